#include "sgdlab/sde.hpp"

#include "sgdlab/quadrature.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>

namespace sgdlab {

namespace {

constexpr double kPsdSlack = 1e-8;

double sigma_amplitude(const Family& fam, double x, int* clamp_events)
{
    double s = fam.sigma(x);
    if (s < 0.0) {
        if (s < -kPsdSlack) throw SdeError("covariance not PSD");
        s = 0.0;
        if (clamp_events) ++*clamp_events;
    }
    return std::sqrt(s);
}

std::int64_t step_count(const SdeConfig& cfg)
{
    if (!(cfg.dt > 0.0)) throw SdeError("dt must be positive");
    if (cfg.t_end < 0.0) throw SdeError("t_end must be nonnegative");
    // the integrator must resolve the chain's time scale
    if (cfg.eta > 0.0 && cfg.dt > cfg.eta) throw SdeError("dt must not exceed eta");
    return std::max<std::int64_t>(1, std::llround(cfg.t_end / cfg.dt));
}

} // namespace

double modified_drift(const Family& fam, double x, double eta)
{
    if (fam.sde_drift) return fam.sde_drift(x, eta);
    const double g = fam.objective.d1(x);
    const double h = fam.objective.d2(x);
    // grad |grad f|^2 = 2 hess * grad
    return -g - 0.5 * eta * h * g;
}

double em_path(const Family& fam, const SdeConfig& cfg, std::uint64_t path, bool flip_noise,
               int* clamp_events, std::vector<double>* trace)
{
    const std::int64_t n = step_count(cfg);
    const double dt = cfg.t_end / static_cast<double>(n);
    const double noise_scale = std::sqrt(dt * cfg.eta);
    double x = cfg.x0;
    if (trace) {
        trace->clear();
        trace->push_back(x);
    }
    for (std::int64_t k = 0; k < n; ++k) {
        StepRng rng(cfg.seed, path, static_cast<std::uint64_t>(k));
        double z = rng.gaussian();
        if (flip_noise) z = -z;
        x += dt * modified_drift(fam, x, cfg.eta) + noise_scale * sigma_amplitude(fam, x, clamp_events) * z;
        if (trace) trace->push_back(x);
    }
    return x;
}

double em_path_with_increments(const Family& fam, const SdeConfig& cfg,
                               std::span<const double> normals, int* clamp_events)
{
    const std::int64_t n = step_count(cfg);
    if (static_cast<std::int64_t>(normals.size()) != n)
        throw SdeError("increment count does not match step count");
    const double dt = cfg.t_end / static_cast<double>(n);
    const double noise_scale = std::sqrt(dt * cfg.eta);
    double x = cfg.x0;
    for (std::int64_t k = 0; k < n; ++k)
        x += dt * modified_drift(fam, x, cfg.eta) +
             noise_scale * sigma_amplitude(fam, x, clamp_events) * normals[static_cast<std::size_t>(k)];
    return x;
}

EmResult em_estimate(const Family& fam, const SdeConfig& cfg, const TestFunction& phi,
                     std::int64_t n_paths, const McOptions& opts)
{
    if (n_paths < 2) throw std::invalid_argument("em_estimate needs n_paths >= 2");
    const std::int64_t units = opts.antithetic ? n_paths / 2 : n_paths;
    const std::int64_t block = std::max<std::int64_t>(1, opts.block);
    const std::int64_t n_blocks = (units + block - 1) / block;
    std::vector<MeanVar> stats(static_cast<std::size_t>(n_blocks));
    std::vector<std::int64_t> clamps(static_cast<std::size_t>(n_blocks), 0);

    parallel_blocks(n_blocks, opts.threads, [&](std::int64_t bi) {
        MeanVar acc;
        int clamp = 0;
        const std::int64_t lo = bi * block;
        const std::int64_t hi = std::min(units, lo + block);
        for (std::int64_t p = lo; p < hi; ++p) {
            if (opts.antithetic) {
                const double a = em_path(fam, cfg, static_cast<std::uint64_t>(p), false, &clamp);
                const double b = em_path(fam, cfg, static_cast<std::uint64_t>(p), true, &clamp);
                acc.add(0.5 * (phi.phi(a) + phi.phi(b)));
            } else {
                acc.add(phi.phi(em_path(fam, cfg, static_cast<std::uint64_t>(p), false, &clamp)));
            }
        }
        stats[static_cast<std::size_t>(bi)] = acc;
        clamps[static_cast<std::size_t>(bi)] = clamp;
    });

    MeanVar total;
    std::int64_t clamp_total = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        total.merge(stats[i]);
        clamp_total += clamps[i];
    }
    EmResult r;
    r.estimate = {total.mean, total.std_error(), total.n};
    r.clamp_events = clamp_total;
    return r;
}

double ou_exact(const TestFunction& phi, double x, double t, double eta)
{
    if (!(eta > 0.0)) throw std::invalid_argument("ou_exact: eta must be positive");
    if (t < 0.0) throw std::invalid_argument("ou_exact: t must be nonnegative");
    const double a = 1.0 + 2.0 * eta;
    const double mean = x * std::exp(-a * t);
    const double s = eta / (2.0 * a) * (1.0 - std::exp(-2.0 * a * t));
    if (s == 0.0) return phi.phi(mean);
    const QuadRule& gh = gauss_hermite(64);
    const double scale = std::sqrt(2.0 * s);
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        acc += gh.weights[i] * phi.phi(mean + scale * gh.nodes[i]);
    return acc / std::sqrt(M_PI);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, int* clamp_events)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw SdeError("covariance not PSD");
    Eigen::VectorXd lam = es.eigenvalues();
    const double scale = std::max(1.0, std::abs(lam.maxCoeff()));
    for (int i = 0; i < lam.size(); ++i) {
        if (lam[i] < 0.0) {
            if (lam[i] < -kPsdSlack * scale) throw SdeError("covariance not PSD");
            lam[i] = 0.0;
            if (clamp_events) ++*clamp_events;
        }
    }
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

} // namespace sgdlab
