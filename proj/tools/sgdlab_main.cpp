#include <CLI11.hpp>
#include <json.hpp>

#include "sgdlab/analysis.hpp"
#include "sgdlab/config.hpp"
#include "sgdlab/csvio.hpp"
#include "sgdlab/examples.hpp"
#include "sgdlab/expansion.hpp"
#include "sgdlab/sde.hpp"
#include "sgdlab/sgd.hpp"
#include "sgdlab/svg.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;
using namespace sgdlab;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitAssertionFailure = 3;

class AssertionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void emit_diag(const std::string& kind, const std::string& message)
{
    json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

int resolve_threads(const ExperimentConfig& cfg, int cli_threads)
{
    if (cli_threads > 0) return cli_threads;
    if (cfg.has("threads")) return static_cast<int>(cfg.get_int("threads"));
    if (const char* env = std::getenv("SGDLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0; // auto
}

EvalMethod parse_method(const std::string& name)
{
    if (name == "closed_form") return EvalMethod::closed_form;
    if (name == "numeric") return EvalMethod::numeric;
    if (name == "auto" || name == "automatic") return EvalMethod::automatic;
    throw ConfigError("unknown method: " + name);
}

struct RunContext {
    ExperimentConfig cfg;
    const RegistryEntry* entry = nullptr;
    TestFunction phi;
    std::uint64_t seed = 0;
    McOptions mc;
    std::string output;
    std::string svg;
    json header;
};

RunContext make_context(const ExperimentConfig& cfg, int cli_threads,
                        const std::string& default_phi)
{
    RunContext ctx;
    ctx.cfg = cfg;
    const std::string family_id = cfg.get_string("family");
    if (!registry_has(family_id)) throw ConfigError("unknown family: " + family_id);
    ctx.entry = &registry_get(family_id);
    ctx.phi = observable(cfg.get_string("phi", default_phi), ctx.entry->family);
    ctx.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 12345));
    ctx.mc.threads = resolve_threads(cfg, cli_threads);
    ctx.output = cfg.get_string("output", cfg.experiment + ".csv");
    ctx.svg = cfg.get_string("svg", std::string(""));
    ctx.header["experiment"] = cfg.experiment;
    ctx.header["family"] = family_id;
    ctx.header["phi"] = ctx.phi.name;
    ctx.header["seed"] = ctx.seed;
    ctx.header["build"] = build_id();
    for (const auto& [k, v] : cfg.kv) ctx.header["config"][k] = v;
    return ctx;
}

std::string curve_table(const WeakErrorCurve& curve)
{
    std::ostringstream os;
    os << "eta,error,std_error,below_noise_floor\n";
    for (const auto& p : curve.points)
        os << format_g17(p.eta) << "," << format_g17(p.error) << "," << format_g17(p.std_error)
           << "," << (p.below_noise_floor ? "true" : "false") << "\n";
    return os.str();
}

int run_weak_error(RunContext& ctx)
{
    const auto eta_grid = ctx.cfg.has("eta_grid")
                              ? ctx.cfg.get_double_list("eta_grid")
                              : std::vector<double>{0.5, 0.25, 0.125, 0.0625};
    const double x = ctx.cfg.get_double("x", 1.0);
    const double T = ctx.cfg.get_double("T", 5.0);
    const std::int64_t n_samples = ctx.cfg.get_int("n_samples", 1000000);
    ctx.mc.antithetic = ctx.cfg.get_bool("antithetic", true);
    const EvalMethod method = parse_method(ctx.cfg.get_string("method", "automatic"));
    std::optional<double> eta0;
    if (ctx.entry->certificate) eta0 = ctx.entry->certificate->eta0;

    for (double eta : eta_grid)
        if (eta0 && eta > *eta0)
            emit_diag("warning", "eta " + format_g17(eta) + " outside certificate (eta0 = " +
                                     format_g17(*eta0) + ")");

    const WeakErrorCurve curve = weak_error_experiment(
        ctx.entry->family, ctx.phi, x, T, eta_grid, n_samples, ctx.seed, ctx.mc, eta0, method);

    ctx.header["n_samples"] = n_samples;
    ctx.header["slope"] = curve.fit.slope;
    ctx.header["slope_ci95"] = curve.fit.slope_ci95;
    if (curve.fit_without_eta_one)
        ctx.header["slope_without_eta_one"] = curve.fit_without_eta_one->slope;
    CsvWriter csv(ctx.output, ctx.header);
    csv.columns({"eta", "n", "mc_value", "std_error", "u_trunc", "error", "below_noise_floor",
                 "outside_certificate"});
    for (const auto& p : curve.points) {
        csv.cell(p.eta);
        csv.cell(p.n);
        csv.cell(p.mc_value);
        csv.cell(p.std_error);
        csv.cell(p.u_trunc);
        csv.cell(p.error);
        csv.cell(p.below_noise_floor);
        csv.cell(p.outside_certificate);
        csv.end_row();
    }

    if (!ctx.svg.empty()) {
        SvgPlot plot;
        plot.title = "weak error vs step size (" + ctx.header["family"].get<std::string>() +
                     ", phi = " + ctx.phi.name + ")";
        plot.x_label = "eta";
        plot.y_label = "|U^n - u^1|";
        plot.x_scale = AxisScale::log2;
        plot.y_scale = AxisScale::log2;
        SvgSeries pts;
        pts.label = "measured";
        pts.line = false;
        SvgSeries fit;
        fit.label = "fit";
        fit.color = "#c23b22";
        fit.markers = false;
        for (const auto& p : curve.points) {
            if (p.error <= 0) continue;
            pts.x.push_back(p.eta);
            pts.y.push_back(p.error);
            fit.x.push_back(p.eta);
            fit.y.push_back(std::exp2(curve.fit.intercept + curve.fit.slope * std::log2(p.eta)));
        }
        plot.series = {pts, fit};
        char ann[64];
        std::snprintf(ann, sizeof(ann), "slope = %.3f", curve.fit.slope);
        plot.annotation = ann;
        plot.data_table = curve_table(curve);
        write_svg_plot(ctx.svg, plot);
    }

    for (const auto& p : curve.points)
        if (p.below_noise_floor)
            emit_diag("warning", "noise floor at eta = " + format_g17(p.eta) +
                                     " (point excluded from the fit)");
    if (curve.n_fit < 2) throw AssertionFailure("fewer than two points above the noise floor");
    if (ctx.cfg.has("slope_min") && curve.fit.slope < ctx.cfg.get_double("slope_min"))
        throw AssertionFailure("slope " + format_g17(curve.fit.slope) + " below slope_min");
    if (ctx.cfg.has("slope_max") && curve.fit.slope > ctx.cfg.get_double("slope_max"))
        throw AssertionFailure("slope " + format_g17(curve.fit.slope) + " above slope_max");
    std::cout << "weak-error: slope = " << curve.fit.slope << " (ci95 +- " << curve.fit.slope_ci95
              << ", " << curve.n_fit << " points)\n";
    return 0;
}

int run_uniformity(RunContext& ctx)
{
    const double x = ctx.cfg.get_double("x", 1.0);
    const double eta = ctx.cfg.get_double("eta", 0.125);
    const auto n_list = ctx.cfg.has("n_list")
                            ? ctx.cfg.get_int_list("n_list")
                            : std::vector<std::int64_t>{1, 5, 20, 100, 500, 2000};
    const std::int64_t n_samples = ctx.cfg.get_int("n_samples", 1000000);
    const double growth = ctx.cfg.get_double("growth_factor", 2.0);
    const double reference_t = ctx.cfg.get_double("reference_t", 5.0);
    ctx.mc.antithetic = ctx.cfg.get_bool("antithetic", true);
    const EvalMethod method = parse_method(ctx.cfg.get_string("method", "automatic"));

    const UniformityResult res = uniformity_check(ctx.entry->family, ctx.phi, x, eta, n_list,
                                                  n_samples, ctx.seed, ctx.mc, reference_t, method);

    ctx.header["n_samples"] = n_samples;
    ctx.header["max_error"] = res.max_error;
    ctx.header["reference_error"] = res.reference_error;
    CsvWriter csv(ctx.output, ctx.header);
    csv.columns({"n", "t", "mc_value", "std_error", "u_trunc", "error", "below_noise_floor",
                 "is_reference"});
    std::ostringstream table;
    table << "n,error\n";
    for (const auto& r : res.rows) {
        csv.cell(r.n);
        csv.cell(r.t);
        csv.cell(r.mc_value);
        csv.cell(r.std_error);
        csv.cell(r.u_trunc);
        csv.cell(r.error);
        csv.cell(r.below_noise_floor);
        csv.cell(r.is_reference);
        csv.end_row();
        table << r.n << "," << format_g17(r.error) << "\n";
        if (r.below_noise_floor)
            emit_diag("warning", "noise floor at n = " + std::to_string(r.n));
    }

    if (!ctx.svg.empty()) {
        SvgPlot plot;
        plot.title = "uniform-in-time error (eta = " + format_g17(eta) + ")";
        plot.x_label = "n";
        plot.y_label = "|U^n - u^1|";
        plot.x_scale = AxisScale::log10;
        plot.y_scale = AxisScale::log10;
        SvgSeries s;
        s.label = "error";
        for (const auto& r : res.rows) {
            if (r.error <= 0 || r.n == 0) continue;
            s.x.push_back(static_cast<double>(r.n));
            s.y.push_back(r.error);
        }
        plot.series = {s};
        plot.data_table = table.str();
        write_svg_plot(ctx.svg, plot);
    }

    const bool growth_ok =
        res.max_error_from_reference_on <= growth * res.reference_error ||
        res.max_error_from_reference_on <= 4.0 * res.rows.back().std_error;
    std::cout << "uniformity: reference error " << res.reference_error << ", max from reference on "
              << res.max_error_from_reference_on << ", median " << res.median_error << "\n";
    if (!growth_ok)
        throw AssertionFailure("error grows with n beyond factor " + format_g17(growth));
    if (!res.no_trend)
        throw AssertionFailure("error at the largest n exceeds twice the median");
    return 0;
}

int run_stationary(RunContext& ctx)
{
    const double eta = ctx.cfg.get_double("eta", 0.5);
    const std::int64_t burn_in = ctx.cfg.get_int("burn_in", 100);
    const std::int64_t n_samples = ctx.cfg.get_int("n_samples", 100000);
    const double x0 = ctx.cfg.get_double("x0", 1.0);
    const int bins = static_cast<int>(ctx.cfg.get_int("bins", 50));
    if (eta > 0.0) {
        const double recommended = std::ceil(std::log(1.0 / eta) / eta);
        if (static_cast<double>(burn_in) < recommended)
            emit_diag("warning", "burn_in below the recommended ceil(log(1/eta)/eta) = " +
                                     format_g17(recommended));
    }

    const auto samples =
        stationary_sample(ctx.entry->family, eta, burn_in, n_samples, ctx.seed, x0, ctx.mc);

    ctx.header["n_samples"] = n_samples;
    CsvWriter csv(ctx.output, ctx.header);
    csv.columns({"sample_id", "x"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
        csv.cell(static_cast<std::int64_t>(i));
        csv.cell(samples[i]);
        csv.end_row();
    }

    if (!ctx.svg.empty()) {
        std::ostringstream table;
        table << "n_samples," << samples.size() << "\n";
        write_svg_histogram(ctx.svg, samples, bins,
                            "stationary histogram (eta = " + format_g17(eta) + ")", table.str());
    }

    if (ctx.cfg.has("assert_uniform_ks")) {
        const double ks = ks_distance_uniform01(samples);
        std::cout << "stationary: KS distance to Uniform[0,1] = " << ks << "\n";
        if (ks > ctx.cfg.get_double("assert_uniform_ks"))
            throw AssertionFailure("KS distance " + format_g17(ks) + " exceeds bound");
    } else {
        MeanVar mv;
        for (double s : samples) mv.add(s);
        std::cout << "stationary: mean = " << mv.mean << " +- " << mv.std_error() << "\n";
    }
    return 0;
}

int run_w2_decay(RunContext& ctx)
{
    const double eta = ctx.cfg.get_double("eta", 0.1);
    const double x0_a = ctx.cfg.get_double("x0_a", 0.5);
    const double x0_b = ctx.cfg.get_double("x0_b", -0.5);
    if (x0_a == x0_b) emit_diag("warning", "identical start points: W2 is pure noise");
    const auto n_grid = ctx.cfg.has("n_grid") ? ctx.cfg.get_int_list("n_grid")
                                              : std::vector<std::int64_t>{0, 1, 2, 5, 10, 20, 50};
    const std::int64_t n_samples = ctx.cfg.get_int("n_samples", 10000);
    const LocalConstants& c = ctx.entry->constants;

    const W2DecayCurve curve = w2_decay_experiment(ctx.entry->family, eta, x0_a, x0_b, n_grid,
                                                   n_samples, ctx.seed, c.gamma, c.L, ctx.mc);

    ctx.header["n_samples"] = n_samples;
    ctx.header["rho_ref"] = curve.rho_ref;
    ctx.header["fitted_log_rate"] = curve.fitted_log_rate;
    CsvWriter csv(ctx.output, ctx.header);
    csv.columns({"n", "w2", "reference_bound"});
    std::ostringstream table;
    table << "n,w2\n";
    const double d0 = std::abs(x0_a - x0_b);
    for (std::size_t j = 0; j < curve.n_grid.size(); ++j) {
        csv.cell(curve.n_grid[j]);
        csv.cell(curve.w2_values[j]);
        csv.cell(std::pow(curve.rho_ref, static_cast<double>(curve.n_grid[j])) * d0);
        csv.end_row();
        table << curve.n_grid[j] << "," << format_g17(curve.w2_values[j]) << "\n";
    }

    if (!ctx.svg.empty()) {
        SvgPlot plot;
        plot.title = "W2 contraction (eta = " + format_g17(eta) + ")";
        plot.x_label = "n";
        plot.y_label = "W2";
        plot.y_scale = AxisScale::log10;
        SvgSeries meas, ref;
        meas.label = "empirical";
        ref.label = "rho_ref^n";
        ref.color = "#c23b22";
        ref.markers = false;
        for (std::size_t j = 0; j < curve.n_grid.size(); ++j) {
            if (curve.w2_values[j] > 0) {
                meas.x.push_back(static_cast<double>(curve.n_grid[j]));
                meas.y.push_back(curve.w2_values[j]);
            }
            const double bound = std::pow(curve.rho_ref, static_cast<double>(curve.n_grid[j])) * d0;
            if (bound > 0) {
                ref.x.push_back(static_cast<double>(curve.n_grid[j]));
                ref.y.push_back(bound);
            }
        }
        plot.series = {meas, ref};
        plot.data_table = table.str();
        write_svg_plot(ctx.svg, plot);
    }

    std::cout << "w2-decay: fitted log rate per step = " << curve.fitted_log_rate
              << ", log rho_ref = " << std::log(curve.rho_ref) << "\n";
    if (ctx.cfg.get_bool("assert_rate_bound", false) &&
        curve.fitted_log_rate > std::log(curve.rho_ref) + 0.02)
        throw AssertionFailure("empirical decay slower than the contraction bound");
    return 0;
}

int run_descent_time(RunContext& ctx)
{
    const auto eta_grid = ctx.cfg.has("eta_grid") ? ctx.cfg.get_double_list("eta_grid")
                                                  : std::vector<double>{0.25, 0.125, 0.0625};
    const std::int64_t n_samples = ctx.cfg.get_int("n_samples", 100000);
    const double x0 = ctx.cfg.get_double("x0", 1.0);
    const double max_spread = ctx.cfg.get_double("max_ratio_spread", 3.0);
    ctx.mc.antithetic = ctx.cfg.get_bool("antithetic", false);

    const DescentResult res =
        descent_time_experiment(ctx.entry->family, eta_grid, n_samples, ctx.seed, x0, ctx.mc);

    ctx.header["n_samples"] = n_samples;
    ctx.header["ratio_spread"] = res.ratio_spread;
    CsvWriter csv(ctx.output, ctx.header);
    csv.columns({"eta", "n_star", "f_gap", "std_error", "gap_over_eta"});
    std::ostringstream table;
    table << "eta,f_gap\n";
    for (const auto& r : res.rows) {
        csv.cell(r.eta);
        csv.cell(r.n_star);
        csv.cell(r.f_gap);
        csv.cell(r.std_error);
        csv.cell(r.gap_over_eta);
        csv.end_row();
        table << format_g17(r.eta) << "," << format_g17(r.f_gap) << "\n";
    }

    if (!ctx.svg.empty()) {
        SvgPlot plot;
        plot.title = "objective gap at n* = ceil(log(1/eta)/eta)";
        plot.x_label = "eta";
        plot.y_label = "E f(X_n*) - f(x*)";
        plot.x_scale = AxisScale::log2;
        plot.y_scale = AxisScale::log2;
        SvgSeries s;
        s.label = "gap";
        for (const auto& r : res.rows) {
            s.x.push_back(r.eta);
            s.y.push_back(r.f_gap);
        }
        plot.series = {s};
        plot.data_table = table.str();
        write_svg_plot(ctx.svg, plot);
    }

    std::cout << "descent-time: gap/eta spread = " << res.ratio_spread << "\n";
    if (res.ratio_spread > max_spread)
        throw AssertionFailure("gap/eta varies by more than " + format_g17(max_spread));
    return 0;
}

int run_expansion_grid(RunContext& ctx)
{
    const double x_min = ctx.cfg.get_double("x_min", -4.0);
    const double x_max = ctx.cfg.get_double("x_max", 4.0);
    const std::int64_t x_count = ctx.cfg.get_int("x_count", 81);
    const double t_min = ctx.cfg.get_double("t_min", 0.0);
    const double t_max = ctx.cfg.get_double("t_max", 2.0);
    const std::int64_t t_count = ctx.cfg.get_int("t_count", 41);
    const double eta = ctx.cfg.get_double("eta", 0.01);
    const EvalMethod method = parse_method(ctx.cfg.get_string("method", "automatic"));
    if (x_count < 1 || t_count < 1) throw ConfigError("grid counts must be positive");

    ctx.header["eta"] = eta;
    CsvWriter csv(ctx.output, ctx.header);
    csv.columns({"x", "t", "u0", "u1", "u_trunc", "method"});
    for (std::int64_t i = 0; i < x_count; ++i) {
        const double x = x_count == 1
                             ? x_min
                             : x_min + (x_max - x_min) * static_cast<double>(i) /
                                   static_cast<double>(x_count - 1);
        for (std::int64_t j = 0; j < t_count; ++j) {
            const double t = t_count == 1
                                 ? t_min
                                 : t_min + (t_max - t_min) * static_cast<double>(j) /
                                       static_cast<double>(t_count - 1);
            const ExpansionEvaluation ev =
                truncated_series(ctx.entry->family, ctx.phi, x, t, eta, method);
            csv.cell(x);
            csv.cell(t);
            csv.cell(ev.u0);
            csv.cell(ev.u1);
            csv.cell(ev.u_trunc);
            csv.cell(std::string(to_string(ev.method)));
            csv.end_row();
        }
    }
    std::cout << "expansion-grid: wrote " << x_count * t_count << " points\n";
    return 0;
}

int run_ou_check(RunContext& ctx)
{
    if (ctx.header["family"].get<std::string>() != "ou")
        throw ConfigError("ou-check requires family = ou");
    // At dt = eta/10 the first-order integrator bias scales with eta; the
    // default keeps it well under the 4-SE resolution of 1e5 paths.
    const double eta = ctx.cfg.get_double("eta", 0.01);
    const double t_mean = ctx.cfg.get_double("t_mean", 1.0);
    const double t_second = ctx.cfg.get_double("t_second", 3.0);
    const double x0 = ctx.cfg.get_double("x0", 1.0);
    const std::int64_t n_paths = ctx.cfg.get_int("n_paths", 100000);
    const double dt = ctx.cfg.get_double("dt", eta / 10.0);
    const Family& fam = ctx.entry->family;

    SdeConfig mean_cfg{eta, dt, t_mean, x0, ctx.seed};
    const TestFunction ident = observable("identity", fam);
    const EmResult mean = em_estimate(fam, mean_cfg, ident, n_paths, ctx.mc);
    const double mean_exact = ou_exact(ident, x0, t_mean, eta);

    SdeConfig second_cfg{eta, dt, t_second, 0.0, ctx.seed + 1};
    const TestFunction square = observable("square", fam);
    const EmResult second = em_estimate(fam, second_cfg, square, n_paths, ctx.mc);
    const double second_exact = ou_exact(square, 0.0, t_second, eta);

    ctx.header["n_paths"] = n_paths;
    ctx.header["dt"] = dt;
    CsvWriter csv(ctx.output, ctx.header);
    csv.columns({"quantity", "em_value", "std_error", "exact", "abs_diff", "within_4se"});
    const bool mean_ok = std::abs(mean.estimate.value - mean_exact) <= 4 * mean.estimate.std_error;
    const bool second_ok =
        std::abs(second.estimate.value - second_exact) <= 4 * second.estimate.std_error;
    csv.cell(std::string("mean"));
    csv.cell(mean.estimate.value);
    csv.cell(mean.estimate.std_error);
    csv.cell(mean_exact);
    csv.cell(std::abs(mean.estimate.value - mean_exact));
    csv.cell(mean_ok);
    csv.end_row();
    csv.cell(std::string("second_moment"));
    csv.cell(second.estimate.value);
    csv.cell(second.estimate.std_error);
    csv.cell(second_exact);
    csv.cell(std::abs(second.estimate.value - second_exact));
    csv.cell(second_ok);
    csv.end_row();

    std::cout << "ou-check: mean " << mean.estimate.value << " vs " << mean_exact << ", second "
              << second.estimate.value << " vs " << second_exact << "\n";
    if (!mean_ok || !second_ok)
        throw AssertionFailure("EM integrator disagrees with the closed form beyond 4 SE");
    return 0;
}

int cmd_run(const std::string& path, int cli_threads, bool dump_only)
{
    ExperimentConfig cfg = parse_config_file(path);
    validate_config(cfg);
    if (dump_only) {
        std::cout << dump_config(cfg);
        return 0;
    }
    RunContext ctx = make_context(cfg, cli_threads, "sin");
    if (cfg.experiment == "weak-error") return run_weak_error(ctx);
    if (cfg.experiment == "uniformity") return run_uniformity(ctx);
    if (cfg.experiment == "stationary") return run_stationary(ctx);
    if (cfg.experiment == "w2-decay") return run_w2_decay(ctx);
    if (cfg.experiment == "descent-time") return run_descent_time(ctx);
    if (cfg.experiment == "expansion-grid") return run_expansion_grid(ctx);
    if (cfg.experiment == "ou-check") return run_ou_check(ctx);
    throw ConfigError("unknown experiment: " + cfg.experiment);
}

json registry_json()
{
    json out = json::array();
    for (const std::string& id : registry_ids()) {
        const RegistryEntry& e = registry_get(id);
        json j;
        j["id"] = id;
        j["minimizer"] = e.family.objective.minimizer;
        j["R"] = e.R;
        j["R1"] = e.R1;
        j["gamma"] = e.constants.gamma;
        j["b"] = e.constants.b;
        j["b_estimated"] = e.constants.b_estimated;
        j["L"] = e.constants.L;
        j["R0"] = e.constants.R0;
        if (e.certificate)
            j["eta0"] = e.certificate->eta0;
        else
            j["certificate_note"] = e.note;
        j["sigma_at_minimizer"] = e.family.sigma(e.family.objective.minimizer);
        j["observables"] = observable_names();
        out.push_back(j);
    }
    return out;
}

int cmd_list_examples(bool as_json)
{
    if (as_json) {
        std::cout << registry_json().dump(2) << "\n";
        return 0;
    }
    for (const std::string& id : registry_ids()) {
        const RegistryEntry& e = registry_get(id);
        std::cout << id << "\n";
        std::cout << "  minimizer x* = " << e.family.objective.minimizer << ", working ball B(x*, "
                  << e.R << "), R1 = " << e.R1 << "\n";
        std::cout << "  gamma = " << e.constants.gamma << ", b = " << e.constants.b
                  << (e.constants.b_estimated ? " (estimated)" : "") << ", L = " << e.constants.L
                  << ", R0 = " << e.constants.R0 << "\n";
        if (e.certificate)
            std::cout << "  eta0 = " << e.certificate->eta0 << "\n";
        else
            std::cout << "  eta0 unavailable: " << e.note << "\n";
    }
    std::cout << "observables: ";
    for (const auto& n : observable_names()) std::cout << n << " ";
    std::cout << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"sgdlab: constant-step-size SGD, its diffusion approximation, and the truncated "
                 "backward-equation expansion"};
    app.require_subcommand(1);

    std::string config_path;
    int threads = 0;
    bool dump_only = false;
    CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--threads", threads, "worker threads (0 = auto)");
    run->add_flag("--dump-config", dump_only, "echo the parsed config and exit");

    bool as_json = false;
    CLI::App* list = app.add_subcommand("list-examples", "print the example registry");
    list->add_flag("--json", as_json, "emit JSON");

    CLI::App* version = app.add_subcommand("version", "print the build identifier");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) return cmd_run(config_path, threads, dump_only);
        if (list->parsed()) return cmd_list_examples(as_json);
        if (version->parsed()) {
            std::cout << "sgdlab " << build_id() << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        emit_diag("config", e.what());
        return kExitConfigError;
    } catch (const AssertionFailure& e) {
        emit_diag("assertion", e.what());
        return kExitAssertionFailure;
    } catch (const std::exception& e) {
        emit_diag("internal", e.what());
        return 1;
    }
    return 0;
}
