#pragma once

#include "sgdlab/expansion.hpp"
#include "sgdlab/model.hpp"
#include "sgdlab/sgd.hpp"
#include "sgdlab/stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sgdlab {

struct WeakErrorPoint {
    double eta = 0.0;
    std::int64_t n = 0;
    double mc_value = 0.0;
    double std_error = 0.0;
    double u_trunc = 0.0;
    double error = 0.0;           // |U^n - u^1(x, n eta)|
    bool below_noise_floor = false; // error < 4 * std_error; excluded from the fit
    bool outside_certificate = false;
};

struct WeakErrorCurve {
    std::vector<WeakErrorPoint> points;
    LineFit fit;                        // log2(error) ~ log2(eta), floor points excluded
    std::optional<LineFit> fit_without_eta_one;
    int n_fit = 0;
};

// |U^n - u^1| over an eta grid at fixed x and n*eta = T, common random
// numbers across the grid (the noise stream depends only on the trajectory
// index). eta0, when given, marks points above the confinement step-size cap.
WeakErrorCurve weak_error_experiment(const Family& fam, const TestFunction& phi, double x,
                                     double T, const std::vector<double>& eta_grid,
                                     std::int64_t n_samples, std::uint64_t seed,
                                     const McOptions& opts = {},
                                     std::optional<double> eta0 = std::nullopt,
                                     EvalMethod method = EvalMethod::automatic);

struct UniformityRow {
    std::int64_t n = 0;
    double t = 0.0;
    double mc_value = 0.0;
    double std_error = 0.0;
    double u_trunc = 0.0;
    double error = 0.0;
    bool below_noise_floor = false;
    bool is_reference = false; // the n with n*eta = reference horizon
};

struct UniformityResult {
    std::vector<UniformityRow> rows;
    double max_error = 0.0;        // over every measured n
    double median_error = 0.0;     // floor-excluded
    double reference_error = 0.0;  // at n*eta = reference_t
    double max_error_from_reference_on = 0.0; // over n with n*eta >= reference_t
    bool no_growth_after_reference = false;   // ... <= 2 * reference_error
    bool no_trend = false;                    // error at largest n <= 2 * median
};

// Uniform-in-time error probe: errors at the given n values plus the
// reference n = round(reference_t / eta).
UniformityResult uniformity_check(const Family& fam, const TestFunction& phi, double x, double eta,
                                  std::vector<std::int64_t> n_list, std::int64_t n_samples,
                                  std::uint64_t seed, const McOptions& opts = {},
                                  double reference_t = 5.0,
                                  EvalMethod method = EvalMethod::automatic);

// Empirical Wasserstein-2 distance between one-dimensional samples: sorted
// coupling, exact for equal sizes; deterministic systematic resampling to a
// common size otherwise.
double w2_empirical_1d(std::vector<double> a, std::vector<double> b);

struct W2DecayCurve {
    std::vector<std::int64_t> n_grid;
    std::vector<double> w2_values;
    double rho_ref = 0.0;       // (1 - 2 gamma eta + eta^2 L^2)^{1/2}
    double fitted_log_rate = 0.0; // slope of log W2 per step
};

W2DecayCurve w2_decay_experiment(const Family& fam, double eta, double x0_a, double x0_b,
                                 const std::vector<std::int64_t>& n_grid, std::int64_t n_samples,
                                 std::uint64_t seed, double gamma, double L,
                                 const McOptions& opts = {});

struct DescentRow {
    double eta = 0.0;
    std::int64_t n_star = 0; // ceil(log(1/eta)/eta)
    double f_gap = 0.0;      // E f(X_{n*}) - f(x*)
    double std_error = 0.0;
    double gap_over_eta = 0.0;
};

struct DescentResult {
    std::vector<DescentRow> rows;
    double ratio_spread = 0.0; // max/min of gap_over_eta
};

DescentResult descent_time_experiment(const Family& fam, const std::vector<double>& eta_grid,
                                      std::int64_t n_samples, std::uint64_t seed, double x0,
                                      const McOptions& opts = {});

} // namespace sgdlab
