#pragma once

#include "sgdlab/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgdlab {

using ScalarFn = std::function<double(double)>;

// Deterministic objective with analytic derivatives. All registered example
// problems are one-dimensional; the Eigen-based view below serves the
// dimension-generic numerics (flows, covariance roots, certification grids).
struct Objective1D {
    ScalarFn f;
    ScalarFn d1;
    ScalarFn d2;
    ScalarFn d3; // empty when the third derivative is not registered
    double minimizer = 0.0;

    bool has_d3() const { return static_cast<bool>(d3); }
};

struct VecObjective {
    int dim = 1;
    std::function<double(const Eigen::VectorXd&)> f;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;
    Eigen::VectorXd minimizer;
};

VecObjective as_vec(const Objective1D& o);

// Observable phi with analytic derivatives to third order.
struct TestFunction {
    std::string name;
    ScalarFn phi;
    ScalarFn d1;
    ScalarFn d2;
    ScalarFn d3;
};

enum class NoiseKind { rademacher, minibatch, custom };

// A noise token. Scalar families use `scalar`; mini-batch families carry the
// sampled component indices.
struct NoiseAtom {
    double scalar = 0.0;
    std::vector<std::int32_t> batch;
};

// A stochastic-gradient family: objective, noise model, and the evaluators
// of the randomized gradients and their covariance. Immutable after
// construction and safe to share across workers; all sampling goes through
// an explicit StepRng.
struct Family {
    std::string id;
    Objective1D objective;
    NoiseKind noise_kind = NoiseKind::rademacher;

    // Scalar-token evaluators (fast path used by the chain loops).
    std::function<double(double x, double xi)> grad_xi;
    std::function<double(double x, double xi)> hess_xi;
    std::function<double(StepRng&)> draw_scalar; // absent for minibatch

    // Generic token evaluators (cover minibatch).
    std::function<double(double x, const NoiseAtom&)> grad_atom;
    std::function<double(double x, const NoiseAtom&)> hess_atom;
    std::function<NoiseAtom(StepRng&)> draw_atom;

    // Finite noise support with probabilities; empty for continuous noise.
    std::vector<std::pair<NoiseAtom, double>> support;

    std::function<double(double)> sigma; // noise covariance Sigma(x)

    // Analytic characteristic intercept x0(x,t) of the transport flow,
    // when a closed form is registered.
    std::function<double(double x, double t)> char_intercept;

    // Explicit modified-SDE drift (x, eta) -> drift. Set only for reference
    // families whose SDE is specified directly rather than assembled from
    // the objective (the OU benchmark).
    std::function<double(double x, double eta)> sde_drift;

    bool scalar_noise() const { return static_cast<bool>(draw_scalar); }
    bool enumerable() const { return !support.empty(); }
};

// (gamma, b, L, R0) measured on B(x*, R), plus the confinement step-size cap
// when the radius condition R0 < R holds.
struct ConvexityCertificate {
    double gamma = 0.0;
    double b = 0.0;
    double L = 0.0;
    double R1 = 0.0;
    double R = 0.0;
    double R0 = 0.0;
    double eta0 = 0.0;
    bool b_estimated = false;
};

struct LocalConstants {
    double gamma = 0.0;
    double b = 0.0;
    double L = 0.0;
    double R0 = 0.0;
    bool b_estimated = false;
};

class CertifyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shift coordinates so the working minimizer sits at the origin. Evaluations
// keep their original values; only the argument is translated.
Family recenter(const Family& fam);

// Measure (gamma, b, L) on B(x*, R): 201-point grid over the recentered ball,
// exact sup over finite noise supports, 1e4-draw estimate otherwise.
LocalConstants measure_local_constants(const Family& fam, double R);

// Confinement certificate on B(x*, R) with convexity radius R1. Throws
// CertifyError("not locally strongly convex") or CertifyError("radius too
// small") when the hypotheses fail.
ConvexityCertificate certify(const Family& fam, double R, double R1);

// The confinement cap min{1/(2 gamma), 3R/(8b), (3 gamma R^2/8 - 2 b R)/(2 gamma b R + b^2)}.
double confinement_eta0(double gamma, double b, double R);

} // namespace sgdlab
