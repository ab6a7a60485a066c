#include "sgdlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgdlab {

WeakErrorCurve weak_error_experiment(const Family& fam, const TestFunction& phi, double x,
                                     double T, const std::vector<double>& eta_grid,
                                     std::int64_t n_samples, std::uint64_t seed,
                                     const McOptions& opts, std::optional<double> eta0,
                                     EvalMethod method)
{
    if (eta_grid.size() < 2) throw std::invalid_argument("weak error grid needs >= 2 step sizes");
    for (std::size_t i = 1; i < eta_grid.size(); ++i)
        if (!(eta_grid[i] < eta_grid[i - 1]))
            throw std::invalid_argument("eta grid must be strictly decreasing");

    WeakErrorCurve curve;
    for (double eta : eta_grid) {
        if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
        WeakErrorPoint p;
        p.eta = eta;
        p.n = std::max<std::int64_t>(1, std::llround(T / eta));
        const double t = static_cast<double>(p.n) * eta;
        ChainConfig cfg;
        cfg.eta = eta;
        cfg.n_steps = p.n;
        cfg.x0 = x;
        cfg.seed = seed;
        const McResult mc = mc_estimate(fam, cfg, phi, n_samples, opts);
        p.mc_value = mc.estimate.value;
        p.std_error = mc.estimate.std_error;
        p.u_trunc = truncated_series(fam, phi, x, t, eta, method).u_trunc;
        p.error = std::abs(p.mc_value - p.u_trunc);
        p.below_noise_floor = p.error < 4.0 * p.std_error;
        p.outside_certificate = !eta0.has_value() || eta > *eta0;
        curve.points.push_back(p);
    }

    std::vector<double> lx, ly, lx_lt1, ly_lt1;
    for (const auto& p : curve.points) {
        if (p.below_noise_floor || p.error <= 0.0) continue;
        lx.push_back(std::log2(p.eta));
        ly.push_back(std::log2(p.error));
        if (p.eta < 1.0) {
            lx_lt1.push_back(lx.back());
            ly_lt1.push_back(ly.back());
        }
    }
    curve.n_fit = static_cast<int>(lx.size());
    if (curve.n_fit >= 2) curve.fit = ols_line(lx, ly);
    if (lx_lt1.size() >= 2 && lx_lt1.size() != lx.size())
        curve.fit_without_eta_one = ols_line(lx_lt1, ly_lt1);
    return curve;
}

UniformityResult uniformity_check(const Family& fam, const TestFunction& phi, double x, double eta,
                                  std::vector<std::int64_t> n_list, std::int64_t n_samples,
                                  std::uint64_t seed, const McOptions& opts, double reference_t,
                                  EvalMethod method)
{
    if (eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
    if (n_list.empty()) throw std::invalid_argument("uniformity check needs n values");
    // eta = 0 freezes the chain; every n serves equally well as reference.
    const std::int64_t n_ref = eta > 0.0
                                   ? std::max<std::int64_t>(1, std::llround(reference_t / eta))
                                   : *std::max_element(n_list.begin(), n_list.end());
    if (std::find(n_list.begin(), n_list.end(), n_ref) == n_list.end()) n_list.push_back(n_ref);
    std::sort(n_list.begin(), n_list.end());
    n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());

    UniformityResult res;
    for (std::int64_t n : n_list) {
        UniformityRow row;
        row.n = n;
        row.t = static_cast<double>(n) * eta;
        row.is_reference = (n == n_ref);
        ChainConfig cfg;
        cfg.eta = eta;
        cfg.n_steps = n;
        cfg.x0 = x;
        cfg.seed = seed;
        const McResult mc = mc_estimate(fam, cfg, phi, n_samples, opts);
        row.mc_value = mc.estimate.value;
        row.std_error = mc.estimate.std_error;
        row.u_trunc = truncated_series(fam, phi, x, row.t, eta, method).u_trunc;
        row.error = std::abs(row.mc_value - row.u_trunc);
        row.below_noise_floor = row.error < 4.0 * row.std_error;
        res.rows.push_back(row);
    }

    std::vector<double> kept;
    for (const auto& r : res.rows) {
        res.max_error = std::max(res.max_error, r.error);
        if (!r.below_noise_floor) kept.push_back(r.error);
        if (r.is_reference) res.reference_error = r.error;
        if (r.t >= reference_t)
            res.max_error_from_reference_on = std::max(res.max_error_from_reference_on, r.error);
    }
    res.median_error = kept.empty() ? 0.0 : median_of(kept);
    res.no_growth_after_reference =
        res.max_error_from_reference_on <= 2.0 * res.reference_error ||
        res.max_error_from_reference_on <= 4.0 * res.rows.back().std_error;
    const UniformityRow& last = res.rows.back();
    res.no_trend = last.below_noise_floor || kept.empty() || last.error <= 2.0 * res.median_error;
    return res;
}

double w2_empirical_1d(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("w2 of empty sample set");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t L = std::max(a.size(), b.size());
    auto quantile = [L](const std::vector<double>& v, std::size_t i) {
        // systematic resampling at (i + 1/2)/L
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(L);
        std::size_t k = static_cast<std::size_t>(u * static_cast<double>(v.size()));
        if (k >= v.size()) k = v.size() - 1;
        return v[k];
    };
    double acc = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        const double d = quantile(a, i) - quantile(b, i);
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(L));
}

W2DecayCurve w2_decay_experiment(const Family& fam, double eta, double x0_a, double x0_b,
                                 const std::vector<std::int64_t>& n_grid, std::int64_t n_samples,
                                 std::uint64_t seed, double gamma, double L,
                                 const McOptions& opts)
{
    if (n_grid.empty()) throw std::invalid_argument("w2 decay needs a nonempty n grid");
    std::vector<std::int64_t> grid = n_grid;
    std::sort(grid.begin(), grid.end());
    const std::int64_t n_max = grid.back();

    const std::size_t g = grid.size();
    std::vector<std::vector<double>> sa(g, std::vector<double>(static_cast<std::size_t>(n_samples)));
    std::vector<std::vector<double>> sb = sa;

    const std::int64_t block = std::max<std::int64_t>(1, opts.block);
    const std::int64_t n_blocks = (n_samples + block - 1) / block;
    parallel_blocks(n_blocks, opts.threads, [&](std::int64_t bi) {
        const std::int64_t lo = bi * block;
        const std::int64_t hi = std::min(n_samples, lo + block);
        for (std::int64_t i = lo; i < hi; ++i) {
            // Same xi stream for both ensembles: the laws stay coupled by
            // common random numbers.
            double xa = x0_a, xb = x0_b;
            std::size_t next = 0;
            for (std::int64_t k = 0; k < n_max && next < g; ++k) {
                while (next < g && grid[next] == k) {
                    sa[next][static_cast<std::size_t>(i)] = xa;
                    sb[next][static_cast<std::size_t>(i)] = xb;
                    ++next;
                }
                StepRng rng(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k));
                if (fam.scalar_noise()) {
                    const double xi = fam.draw_scalar(rng);
                    xa -= eta * fam.grad_xi(xa, xi);
                    xb -= eta * fam.grad_xi(xb, xi);
                } else {
                    const NoiseAtom atom = fam.draw_atom(rng);
                    xa -= eta * fam.grad_atom(xa, atom);
                    xb -= eta * fam.grad_atom(xb, atom);
                }
            }
            while (next < g) {
                sa[next][static_cast<std::size_t>(i)] = xa;
                sb[next][static_cast<std::size_t>(i)] = xb;
                ++next;
            }
        }
    });

    W2DecayCurve curve;
    curve.n_grid = grid;
    curve.rho_ref = std::sqrt(std::max(0.0, 1.0 - 2.0 * gamma * eta + eta * eta * L * L));
    for (std::size_t j = 0; j < g; ++j)
        curve.w2_values.push_back(w2_empirical_1d(sa[j], sb[j]));

    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < g; ++j) {
        if (curve.w2_values[j] > 0.0) {
            xs.push_back(static_cast<double>(grid[j]));
            ys.push_back(std::log(curve.w2_values[j]));
        }
    }
    if (xs.size() >= 2) curve.fitted_log_rate = ols_line(xs, ys).slope;
    return curve;
}

DescentResult descent_time_experiment(const Family& fam, const std::vector<double>& eta_grid,
                                      std::int64_t n_samples, std::uint64_t seed, double x0,
                                      const McOptions& opts)
{
    if (eta_grid.empty()) throw std::invalid_argument("descent experiment needs step sizes");
    const TestFunction phi = [&] {
        TestFunction t;
        t.name = "f";
        t.phi = fam.objective.f;
        t.d1 = fam.objective.d1;
        t.d2 = fam.objective.d2;
        return t;
    }();
    const double f_min = fam.objective.f(fam.objective.minimizer);

    DescentResult res;
    for (double eta : eta_grid) {
        if (!(eta > 0.0) || eta >= 1.0)
            throw std::invalid_argument("descent experiment needs eta in (0,1)");
        DescentRow row;
        row.eta = eta;
        row.n_star = static_cast<std::int64_t>(std::ceil(std::log(1.0 / eta) / eta));
        ChainConfig cfg;
        cfg.eta = eta;
        cfg.n_steps = row.n_star;
        cfg.x0 = x0;
        cfg.seed = seed;
        const McResult mc = mc_estimate(fam, cfg, phi, n_samples, opts);
        row.f_gap = mc.estimate.value - f_min;
        row.std_error = mc.estimate.std_error;
        row.gap_over_eta = row.f_gap / eta;
        res.rows.push_back(row);
    }
    double lo = res.rows.front().gap_over_eta, hi = lo;
    for (const auto& r : res.rows) {
        lo = std::min(lo, r.gap_over_eta);
        hi = std::max(hi, r.gap_over_eta);
    }
    res.ratio_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return res;
}

} // namespace sgdlab
