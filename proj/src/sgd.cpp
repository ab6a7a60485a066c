#include "sgdlab/sgd.hpp"

#include <cmath>
#include <stdexcept>

namespace sgdlab {

double sgd_step(const Family& fam, double x, double eta, double xi)
{
    return x - eta * fam.grad_xi(x, xi);
}

double sgd_step_atom(const Family& fam, double x, double eta, const NoiseAtom& atom)
{
    return x - eta * fam.grad_atom(x, atom);
}

TrajectoryOutcome run_trajectory(const Family& fam, const ChainConfig& cfg, std::uint64_t traj,
                                 bool flip_noise, std::vector<double>* path)
{
    TrajectoryOutcome out;
    double x = cfg.x0;
    if (path) {
        path->clear();
        path->push_back(x);
    }
    const bool scalar = fam.scalar_noise();
    if (flip_noise && !scalar)
        throw std::invalid_argument("antithetic streams need scalar sign-symmetric noise");
    for (std::int64_t k = 0; k < cfg.n_steps; ++k) {
        StepRng rng(cfg.seed, traj, static_cast<std::uint64_t>(k));
        if (scalar) {
            double xi = fam.draw_scalar(rng);
            if (flip_noise) xi = -xi;
            x -= cfg.eta * fam.grad_xi(x, xi);
        } else {
            const NoiseAtom atom = fam.draw_atom(rng);
            x -= cfg.eta * fam.grad_atom(x, atom);
        }
        if (cfg.track_ball && std::abs(x - cfg.ball_center) > cfg.ball_radius) ++out.escape_count;
        if (path) path->push_back(x);
    }
    out.x_final = x;
    return out;
}

namespace {

struct BlockAccum {
    MeanVar stat;
    std::int64_t escapes = 0;
};

McResult reduce_blocks(const std::vector<BlockAccum>& blocks)
{
    MeanVar total;
    std::int64_t escapes = 0;
    for (const auto& b : blocks) {
        total.merge(b.stat);
        escapes += b.escapes;
    }
    McResult r;
    r.estimate.value = total.mean;
    r.estimate.std_error = total.std_error();
    r.estimate.n_samples = total.n;
    r.escape_count = escapes;
    return r;
}

// x0_of(traj) supplies the initial point; with antithetic pairing both pair
// members share it and only the noise stream flips.
McResult mc_run(const Family& fam, const ChainConfig& cfg, const TestFunction& phi,
                std::int64_t n_samples, const McOptions& opts,
                const std::function<double(std::uint64_t)>& x0_of)
{
    if (n_samples < 2) throw std::invalid_argument("mc_estimate needs n_samples >= 2");
    if (opts.antithetic && !fam.scalar_noise())
        throw std::invalid_argument("antithetic sampling unavailable for this noise model");

    const std::int64_t units = opts.antithetic ? n_samples / 2 : n_samples;
    const std::int64_t block = std::max<std::int64_t>(1, opts.block);
    const std::int64_t n_blocks = (units + block - 1) / block;
    std::vector<BlockAccum> blocks(static_cast<std::size_t>(n_blocks));

    parallel_blocks(n_blocks, opts.threads, [&](std::int64_t bi) {
        BlockAccum acc;
        const std::int64_t lo = bi * block;
        const std::int64_t hi = std::min(units, lo + block);
        for (std::int64_t u = lo; u < hi; ++u) {
            ChainConfig c = cfg;
            c.x0 = x0_of(static_cast<std::uint64_t>(u));
            if (opts.antithetic) {
                const TrajectoryOutcome a = run_trajectory(fam, c, static_cast<std::uint64_t>(u), false);
                const TrajectoryOutcome b = run_trajectory(fam, c, static_cast<std::uint64_t>(u), true);
                acc.stat.add(0.5 * (phi.phi(a.x_final) + phi.phi(b.x_final)));
                acc.escapes += a.escape_count + b.escape_count;
            } else {
                const TrajectoryOutcome a = run_trajectory(fam, c, static_cast<std::uint64_t>(u), false);
                acc.stat.add(phi.phi(a.x_final));
                acc.escapes += a.escape_count;
            }
        }
        blocks[static_cast<std::size_t>(bi)] = acc;
    });
    return reduce_blocks(blocks);
}

} // namespace

McResult mc_estimate(const Family& fam, const ChainConfig& cfg, const TestFunction& phi,
                     std::int64_t n_samples, const McOptions& opts)
{
    const double x0 = cfg.x0;
    return mc_run(fam, cfg, phi, n_samples, opts, [x0](std::uint64_t) { return x0; });
}

McResult mc_estimate_measure(const Family& fam, const ChainConfig& cfg, const InitialMeasure& mu0,
                             const TestFunction& phi, std::int64_t n_samples,
                             const McOptions& opts)
{
    if (mu0.atoms.empty() || mu0.atoms.size() != mu0.weights.size())
        throw std::invalid_argument("initial measure needs matching atoms/weights");
    std::vector<double> cdf(mu0.weights.size());
    double total = 0;
    for (std::size_t i = 0; i < mu0.weights.size(); ++i) {
        if (mu0.weights[i] < 0) throw std::invalid_argument("negative weight in initial measure");
        total += mu0.weights[i];
        cdf[i] = total;
    }
    if (total <= 0) throw std::invalid_argument("initial measure has zero mass");
    for (auto& c : cdf) c /= total;
    const std::uint64_t seed = cfg.seed;
    auto x0_of = [&mu0, cdf, seed](std::uint64_t traj) {
        StepRng rng(seed, traj, kInitialDrawStep);
        const double u = rng.uniform01();
        for (std::size_t i = 0; i < cdf.size(); ++i)
            if (u <= cdf[i]) return mu0.atoms[i];
        return mu0.atoms.back();
    };
    return mc_run(fam, cfg, phi, n_samples, opts, x0_of);
}

std::vector<EstimateWithError> coupled_pair(const Family& fam, double eta, double y0, double z0,
                                            int n_max, std::int64_t n_pairs, std::uint64_t seed,
                                            const McOptions& opts)
{
    if (n_pairs < 2) throw std::invalid_argument("coupled_pair needs n_pairs >= 2");
    const std::int64_t block = std::max<std::int64_t>(1, opts.block);
    const std::int64_t n_blocks = (n_pairs + block - 1) / block;
    const std::size_t levels = static_cast<std::size_t>(n_max) + 1;
    std::vector<std::vector<MeanVar>> blocks(static_cast<std::size_t>(n_blocks),
                                             std::vector<MeanVar>(levels));

    parallel_blocks(n_blocks, opts.threads, [&](std::int64_t bi) {
        auto& acc = blocks[static_cast<std::size_t>(bi)];
        const std::int64_t lo = bi * block;
        const std::int64_t hi = std::min(n_pairs, lo + block);
        for (std::int64_t p = lo; p < hi; ++p) {
            double y = y0, z = z0;
            acc[0].add((y - z) * (y - z));
            for (int k = 0; k < n_max; ++k) {
                StepRng rng(seed, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(k));
                if (fam.scalar_noise()) {
                    const double xi = fam.draw_scalar(rng);
                    y -= eta * fam.grad_xi(y, xi);
                    z -= eta * fam.grad_xi(z, xi);
                } else {
                    const NoiseAtom atom = fam.draw_atom(rng);
                    y -= eta * fam.grad_atom(y, atom);
                    z -= eta * fam.grad_atom(z, atom);
                }
                acc[static_cast<std::size_t>(k) + 1].add((y - z) * (y - z));
            }
        }
    });

    std::vector<EstimateWithError> out(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        MeanVar total;
        for (const auto& b : blocks) total.merge(b[k]);
        out[k] = {total.mean, total.std_error(), total.n};
    }
    return out;
}

std::vector<double> stationary_sample(const Family& fam, double eta, std::int64_t burn_in,
                                      std::int64_t n_samples, std::uint64_t seed, double x0,
                                      const McOptions& opts)
{
    std::vector<double> samples(static_cast<std::size_t>(n_samples));
    const std::int64_t block = std::max<std::int64_t>(1, opts.block);
    const std::int64_t n_blocks = (n_samples + block - 1) / block;
    ChainConfig cfg;
    cfg.eta = eta;
    cfg.n_steps = burn_in;
    cfg.x0 = x0;
    cfg.seed = seed;
    parallel_blocks(n_blocks, opts.threads, [&](std::int64_t bi) {
        const std::int64_t lo = bi * block;
        const std::int64_t hi = std::min(n_samples, lo + block);
        for (std::int64_t i = lo; i < hi; ++i)
            samples[static_cast<std::size_t>(i)] =
                run_trajectory(fam, cfg, static_cast<std::uint64_t>(i)).x_final;
    });
    return samples;
}

namespace {

void check_enumerable(const Family& fam, int n)
{
    if (!fam.enumerable())
        throw std::invalid_argument("family noise support is not enumerable");
    const double paths = std::pow(static_cast<double>(fam.support.size()), n);
    if (paths > 6.0e7) throw std::invalid_argument("enumeration too large");
}

} // namespace

double enumerate_expectation(const Family& fam, double x0, double eta, int n, const ScalarFn& phi)
{
    check_enumerable(fam, n);
    double acc = 0.0;
    std::function<void(double, double, int)> rec = [&](double x, double p, int depth) {
        if (depth == n) {
            acc += p * phi(x);
            return;
        }
        for (const auto& [atom, pa] : fam.support)
            rec(x - eta * fam.grad_atom(x, atom), p * pa, depth + 1);
    };
    rec(x0, 1.0, 0);
    return acc;
}

std::vector<double> enumerate_coupled_sqdist(const Family& fam, double y0, double z0, double eta,
                                             int n)
{
    check_enumerable(fam, n);
    std::vector<double> acc(static_cast<std::size_t>(n) + 1, 0.0);
    std::function<void(double, double, double, int)> rec = [&](double y, double z, double p,
                                                               int depth) {
        acc[static_cast<std::size_t>(depth)] += p * (y - z) * (y - z);
        if (depth == n) return;
        for (const auto& [atom, pa] : fam.support)
            rec(y - eta * fam.grad_atom(y, atom), z - eta * fam.grad_atom(z, atom), p * pa,
                depth + 1);
    };
    rec(y0, z0, 1.0, 0);
    return acc;
}

double enumerate_max_excursion(const Family& fam, double x0, double eta, int n, double center)
{
    check_enumerable(fam, n);
    double worst = std::abs(x0 - center);
    std::function<void(double, int)> rec = [&](double x, int depth) {
        worst = std::max(worst, std::abs(x - center));
        if (depth == n) return;
        for (const auto& [atom, pa] : fam.support)
            rec(x - eta * fam.grad_atom(x, atom), depth + 1);
    };
    rec(x0, 0);
    return worst;
}

} // namespace sgdlab
