#pragma once

#include "sgdlab/model.hpp"
#include "sgdlab/stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sgdlab {

struct ChainConfig {
    double eta = 0.1;
    std::int64_t n_steps = 0;
    double x0 = 0.0;
    std::uint64_t seed = 0;

    // Confinement diagnostics: count excursions out of B(center, radius).
    // a valid certificate guarantees zero of them when eta <= eta0, which the tests assert.
    bool track_ball = false;
    double ball_center = 0.0;
    double ball_radius = 0.0;
};

struct EstimateWithError {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
};

struct McOptions {
    int threads = 0;          // 0 = hardware concurrency
    bool antithetic = false;  // pair each trajectory with its sign-flipped noise stream
    std::int64_t block = 4096;
};

// One update X <- x - eta * grad(x; xi) with a scalar noise token.
double sgd_step(const Family& fam, double x, double eta, double xi);
double sgd_step_atom(const Family& fam, double x, double eta, const NoiseAtom& atom);

struct TrajectoryOutcome {
    double x_final = 0.0;
    std::int64_t escape_count = 0;
};

// Runs the chain with the i.i.d. noise stream keyed by (seed, traj, step).
// Bit-reproducible for a given (seed, traj) regardless of scheduling.
// With flip_noise the scalar noise stream is negated (antithetic partner).
TrajectoryOutcome run_trajectory(const Family& fam, const ChainConfig& cfg, std::uint64_t traj,
                                 bool flip_noise = false, std::vector<double>* path = nullptr);

struct McResult {
    EstimateWithError estimate;
    std::int64_t escape_count = 0;
};

// Monte Carlo mean of phi(X_n) over independent trajectories. The reduction
// runs over fixed-size blocks merged in index order, so results do not
// depend on the worker count. With antithetic on, trajectories come in
// (stream, flipped-stream) pairs and statistics are over pair means.
McResult mc_estimate(const Family& fam, const ChainConfig& cfg, const TestFunction& phi,
                     std::int64_t n_samples, const McOptions& opts = {});

// Discrete initial measure (atoms with weights).
struct InitialMeasure {
    std::vector<double> atoms;
    std::vector<double> weights; // normalized internally
};

McResult mc_estimate_measure(const Family& fam, const ChainConfig& cfg, const InitialMeasure& mu0,
                             const TestFunction& phi, std::int64_t n_samples,
                             const McOptions& opts = {});

// Coupled chains driven by the identical xi stream; returns Monte Carlo
// estimates of E|Y_k - Z_k|^2 for k = 0..n_max.
std::vector<EstimateWithError> coupled_pair(const Family& fam, double eta, double y0, double z0,
                                            int n_max, std::int64_t n_pairs, std::uint64_t seed,
                                            const McOptions& opts = {});

// n_samples draws of X_{burn_in} from independent chains started at x0.
std::vector<double> stationary_sample(const Family& fam, double eta, std::int64_t burn_in,
                                      std::int64_t n_samples, std::uint64_t seed, double x0,
                                      const McOptions& opts = {});

// --- Exhaustive xi-sequence enumeration (exact oracles for small n) ---

// Expectation of phi(X_n) summed over every path of a finite noise support.
double enumerate_expectation(const Family& fam, double x0, double eta, int n,
                             const ScalarFn& phi);

// E|Y_k - Z_k|^2, k = 0..n, exact over all shared-noise paths.
std::vector<double> enumerate_coupled_sqdist(const Family& fam, double y0, double z0, double eta,
                                             int n);

// sup over paths and steps k <= n of |X_k - center|.
double enumerate_max_excursion(const Family& fam, double x0, double eta, int n, double center);

} // namespace sgdlab
