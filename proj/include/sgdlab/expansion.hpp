#pragma once

#include "sgdlab/model.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace sgdlab {

class ExpansionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EvalMethod { closed_form, numeric, automatic };

const char* to_string(EvalMethod m);

struct QuadSettings {
    int duhamel_panels = 64; // composite Gauss-Legendre, 5 nodes per panel
};

// Characteristic state: y(t) of dy/dt = -grad f(y) together with the first
// and second variations J = dy/dx and K = d^2 y/dx^2 (sensitivity ODEs
// J' = -f''(y) J, K' = -f'''(y) J^2 - f''(y) K).
struct FlowState {
    double y = 0.0;
    double J = 1.0;
    double K = 0.0;
};

// Classical RK4 with fixed step h = min(1e-3, t/100), overridable for
// step-halving checks. The second variation requires the registered third
// derivative; it is skipped when with_k is false.
FlowState characteristic_flow(const Family& fam, double x, double t, bool with_k = true,
                              double h_override = 0.0);

// Dense output of y(s) at the (ascending) times in s, single forward pass.
std::vector<double> flow_at_times(const Family& fam, double x, const std::vector<double>& s);

// Dimension-generic characteristic flow and first variation.
Eigen::VectorXd characteristic_flow_vec(const VecObjective& obj, const Eigen::VectorXd& x, double t);
void characteristic_flow_with_jacobian_vec(const VecObjective& obj, const Eigen::VectorXd& x,
                                           double t, Eigen::VectorXd& y, Eigen::MatrixXd& jac);

struct U0Derivatives {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// u0(x,t) = phi(y(t)) and its first two spatial derivatives via the
// variational ODEs (never by finite differences).
U0Derivatives u0_with_derivatives(const Family& fam, const TestFunction& phi, double x, double t);

double u0_eval(const Family& fam, const TestFunction& phi, double x, double t,
               EvalMethod method = EvalMethod::automatic);

// L2 applied to a function with spatial derivatives (du, d2u) at x:
// -1/4 grad|grad f|^2 . du + 1/2 Tr(Sigma d2u), i.e. in one dimension
// -1/2 f' f'' du + 1/2 Sigma d2u.
double apply_l2(const Family& fam, double x, double du, double d2u);

// u1(x,t): numeric = Duhamel quadrature of s -> L2 u0(y(s), t-s);
// closed_form = the four-term antiderivative expression built on the
// registered characteristic intercept (constant Sigma only).
double u1_eval(const Family& fam, const TestFunction& phi, double x, double t,
               EvalMethod method = EvalMethod::automatic, const QuadSettings& quad = {});

struct ExpansionEvaluation {
    double u0 = 0.0;
    double u1 = 0.0;
    double u_trunc = 0.0; // u0 + eta * u1
    EvalMethod method = EvalMethod::numeric;
    double x = 0.0;
    double t = 0.0;
    double eta = 0.0;
};

ExpansionEvaluation truncated_series(const Family& fam, const TestFunction& phi, double x,
                                     double t, double eta,
                                     EvalMethod method = EvalMethod::automatic,
                                     const QuadSettings& quad = {});

struct Phi1Result {
    double value = 0.0;
    double tail_bound = 0.0; // e^{-2 gamma s} envelope of the truncated tail
    double t_max = 0.0;
};

// phi_1 = int_0^inf L2 u0(x*, s) ds truncated at t_max (default 20 / f''(x*)).
Phi1Result phi1_limit(const Family& fam, const TestFunction& phi, double t_max = 0.0,
                      const QuadSettings& quad = {});

// Average of the truncated series over a discrete initial measure; realizes
// int phi d(nu0 + eta nu1) by duality. Support must lie in
// B(ball_center, ball_radius).
double pair_with_initial_measure(const Family& fam, const TestFunction& phi,
                                 const std::vector<double>& atoms,
                                 const std::vector<double>& weights, double t, double eta,
                                 double ball_center, double ball_radius,
                                 EvalMethod method = EvalMethod::automatic);

} // namespace sgdlab
