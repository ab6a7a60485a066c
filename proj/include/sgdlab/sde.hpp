#pragma once

#include "sgdlab/model.hpp"
#include "sgdlab/sgd.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace sgdlab {

struct SdeConfig {
    double eta = 0.1;   // SGD step size: drift correction and noise amplitude
    double dt = 0.01;   // integrator step (default eta/10)
    double t_end = 1.0;
    double x0 = 0.0;
    std::uint64_t seed = 0;
};

class SdeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Drift of the modified equation, -grad f - (eta/4) grad |grad f|^2,
// assembled from the analytic derivatives; families with an explicit
// registered SDE drift use that instead.
double modified_drift(const Family& fam, double x, double eta);

// Euler-Maruyama path: X <- X + dt*drift + sqrt(dt*eta*Sigma(X)) * zeta.
// Gaussian increments keyed by (seed, path, step). Negative Sigma beyond
// roundoff raises SdeError("covariance not PSD"); tiny negatives clamp to 0
// and are counted in *clamp_events when provided.
double em_path(const Family& fam, const SdeConfig& cfg, std::uint64_t path,
               bool flip_noise = false, int* clamp_events = nullptr,
               std::vector<double>* trace = nullptr);

// As above with caller-supplied standard-normal increments (one per step).
// Lets tests couple runs at different dt through a shared Brownian path.
double em_path_with_increments(const Family& fam, const SdeConfig& cfg,
                               std::span<const double> normals, int* clamp_events = nullptr);

struct EmResult {
    EstimateWithError estimate;
    std::int64_t clamp_events = 0;
};

EmResult em_estimate(const Family& fam, const SdeConfig& cfg, const TestFunction& phi,
                     std::int64_t n_paths, const McOptions& opts = {});

// Closed-form E_x[phi(X_t)] of the OU benchmark (Gaussian with mean
// x e^{-(1+2 eta) t} and variance eta/(2(1+2 eta)) (1 - e^{-2(1+2 eta)t})),
// evaluated by 64-node Gauss-Hermite quadrature.
double ou_exact(const TestFunction& phi, double x, double t, double eta);

// Symmetric PSD square root by eigendecomposition with eigenvalue clamping
// at zero; genuinely negative spectra raise SdeError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, int* clamp_events = nullptr);

} // namespace sgdlab
