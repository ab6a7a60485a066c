#include "sgdlab/expansion.hpp"

#include "sgdlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace sgdlab {

namespace {

constexpr double kHodeCap = 1e-3;
constexpr double kBlowupGuard = 1e8;
// Beyond gamma*t of about 10 the closed form loses digits to cancellation
// between e^{gamma t}-sized terms; automatic evaluation switches to the
// Duhamel path there.
constexpr double kClosedFormMaxT = 10.0;

double step_size(double t)
{
    return std::min(kHodeCap, t / 100.0);
}

struct Derivs {
    double dy, dJ, dK;
};

Derivs rhs(const Family& fam, const FlowState& s, bool with_k)
{
    Derivs d;
    d.dy = -fam.objective.d1(s.y);
    d.dJ = -fam.objective.d2(s.y) * s.J;
    d.dK = with_k ? -fam.objective.d3(s.y) * s.J * s.J - fam.objective.d2(s.y) * s.K : 0.0;
    return d;
}

FlowState rk4_advance(const Family& fam, FlowState s, double duration, bool with_k,
                      double h_override = 0.0)
{
    if (duration <= 0.0) return s;
    const double h0 = h_override > 0.0 ? h_override : step_size(duration);
    const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(duration / h0)));
    const double h = duration / static_cast<double>(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const Derivs k1 = rhs(fam, s, with_k);
        FlowState s2{s.y + 0.5 * h * k1.dy, s.J + 0.5 * h * k1.dJ, s.K + 0.5 * h * k1.dK};
        const Derivs k2 = rhs(fam, s2, with_k);
        FlowState s3{s.y + 0.5 * h * k2.dy, s.J + 0.5 * h * k2.dJ, s.K + 0.5 * h * k2.dK};
        const Derivs k3 = rhs(fam, s3, with_k);
        FlowState s4{s.y + h * k3.dy, s.J + h * k3.dJ, s.K + h * k3.dK};
        const Derivs k4 = rhs(fam, s4, with_k);
        s.y += h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
        s.J += h / 6.0 * (k1.dJ + 2.0 * k2.dJ + 2.0 * k3.dJ + k4.dJ);
        s.K += h / 6.0 * (k1.dK + 2.0 * k2.dK + 2.0 * k3.dK + k4.dK);
        if (std::abs(s.y) > kBlowupGuard)
            throw ExpansionError("characteristic flow diverged (point outside the basin)");
    }
    return s;
}

bool sigma_is_constant(const Family& fam, double a, double b)
{
    const double s0 = fam.sigma(0.5 * (a + b));
    return std::abs(fam.sigma(a) - s0) <= 1e-12 * std::max(1.0, std::abs(s0)) &&
           std::abs(fam.sigma(b) - s0) <= 1e-12 * std::max(1.0, std::abs(s0));
}

void require_third_derivative(const Family& fam)
{
    if (!fam.objective.has_d3())
        throw ExpansionError("third derivative required for the Duhamel path");
}

double u1_closed_form(const Family& fam, const TestFunction& phi, double x, double t);
double u1_numeric(const Family& fam, const TestFunction& phi, double x, double t,
                  const QuadSettings& quad);

EvalMethod resolve_method(const Family& fam, double t, EvalMethod m)
{
    if (m != EvalMethod::automatic) return m;
    if (fam.char_intercept && t <= kClosedFormMaxT) return EvalMethod::closed_form;
    return EvalMethod::numeric;
}

} // namespace

const char* to_string(EvalMethod m)
{
    switch (m) {
    case EvalMethod::closed_form: return "closed_form";
    case EvalMethod::numeric: return "numeric";
    default: return "automatic";
    }
}

FlowState characteristic_flow(const Family& fam, double x, double t, bool with_k,
                              double h_override)
{
    if (with_k) require_third_derivative(fam);
    return rk4_advance(fam, FlowState{x, 1.0, 0.0}, t, with_k, h_override);
}

std::vector<double> flow_at_times(const Family& fam, double x, const std::vector<double>& s)
{
    std::vector<double> out;
    out.reserve(s.size());
    FlowState st{x, 1.0, 0.0};
    double at = 0.0;
    for (double target : s) {
        if (target < at) throw std::invalid_argument("flow_at_times needs ascending times");
        st = rk4_advance(fam, st, target - at, false);
        at = target;
        out.push_back(st.y);
    }
    return out;
}

Eigen::VectorXd characteristic_flow_vec(const VecObjective& obj, const Eigen::VectorXd& x, double t)
{
    Eigen::VectorXd y = x;
    Eigen::MatrixXd jac;
    characteristic_flow_with_jacobian_vec(obj, x, t, y, jac);
    return y;
}

void characteristic_flow_with_jacobian_vec(const VecObjective& obj, const Eigen::VectorXd& x,
                                           double t, Eigen::VectorXd& y, Eigen::MatrixXd& jac)
{
    const int d = obj.dim;
    y = x;
    jac = Eigen::MatrixXd::Identity(d, d);
    if (t <= 0.0) return;
    const double h0 = step_size(t);
    const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t / h0)));
    const double h = t / static_cast<double>(n);
    auto f = [&](const Eigen::VectorXd& yy, const Eigen::MatrixXd& jj,
                 Eigen::VectorXd& dy, Eigen::MatrixXd& dj) {
        dy = -obj.grad(yy);
        dj = -obj.hess(yy) * jj;
    };
    Eigen::VectorXd k1y(d), k2y(d), k3y(d), k4y(d);
    Eigen::MatrixXd k1j(d, d), k2j(d, d), k3j(d, d), k4j(d, d);
    for (std::int64_t i = 0; i < n; ++i) {
        f(y, jac, k1y, k1j);
        f(y + 0.5 * h * k1y, jac + 0.5 * h * k1j, k2y, k2j);
        f(y + 0.5 * h * k2y, jac + 0.5 * h * k2j, k3y, k3j);
        f(y + h * k3y, jac + h * k3j, k4y, k4j);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        jac += h / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
    }
}

U0Derivatives u0_with_derivatives(const Family& fam, const TestFunction& phi, double x, double t)
{
    const FlowState st = characteristic_flow(fam, x, t, true);
    U0Derivatives d;
    d.value = phi.phi(st.y);
    d.d1 = phi.d1(st.y) * st.J;
    d.d2 = phi.d2(st.y) * st.J * st.J + phi.d1(st.y) * st.K;
    return d;
}

double u0_eval(const Family& fam, const TestFunction& phi, double x, double t, EvalMethod method)
{
    switch (resolve_method(fam, t, method)) {
    case EvalMethod::closed_form:
        if (!fam.char_intercept) throw ExpansionError("no closed form registered");
        return phi.phi(fam.char_intercept(x, t));
    default:
        return phi.phi(rk4_advance(fam, FlowState{x, 1.0, 0.0}, t, false).y);
    }
}

double apply_l2(const Family& fam, double x, double du, double d2u)
{
    return -0.5 * fam.objective.d1(x) * fam.objective.d2(x) * du + 0.5 * fam.sigma(x) * d2u;
}

namespace {

// Frozen characteristic at the minimizer. With c = f''(x*), the first and
// second flow variations are J = e^{-c s} and K = -(f'''/c)(e^{-c s} - e^{-2c s}),
// so u1(x*, t) integrates (Sigma/2)(phi'' J^2 + phi' K).
double u1_at_minimizer(const Family& fam, const TestFunction& phi, double t)
{
    const double xs = fam.objective.minimizer;
    const double c = fam.objective.d2(xs);
    const double sig = fam.sigma(xs);
    if (c <= 0.0) throw ExpansionError("singular characteristic");
    if (!fam.objective.has_d3())
        throw ExpansionError("third derivative required for the Duhamel path");
    const double third = fam.objective.d3(xs);
    const double em1 = 1.0 - std::exp(-c * t);
    const double em2 = 1.0 - std::exp(-2.0 * c * t);
    return 0.5 * sig * phi.d2(xs) * em2 / (2.0 * c) -
           0.5 * sig * phi.d1(xs) * third / c * (em1 / c - em2 / (2.0 * c));
}

double u1_closed_form(const Family& fam, const TestFunction& phi, double x, double t)
{
    if (!fam.char_intercept) throw ExpansionError("no closed form registered");
    const double xs = fam.objective.minimizer;
    if (std::abs(x - xs) < 1e-9) return u1_at_minimizer(fam, phi, t);
    if (!sigma_is_constant(fam, xs, x))
        throw ExpansionError("no closed form registered"); // needs constant Sigma
    const double sig = fam.sigma(x);

    const double x0 = fam.char_intercept(x, t);
    const auto& d1 = fam.objective.d1;
    const auto& d2 = fam.objective.d2;
    const double fp_x = d1(x);
    const double fp_x0 = d1(x0);
    if (fp_x == 0.0 || fp_x0 == 0.0 || fp_x * fp_x0 < 0.0 ||
        d1(0.5 * (x + x0)) * fp_x <= 0.0)
        throw ExpansionError("singular characteristic");

    const double inv_cube = adaptive_gauss_kronrod(x0, x, 1e-14, 1e-11, [&](double xi) {
        const double g = d1(xi);
        return 1.0 / (g * g * g);
    });

    const double a = fp_x0 * phi.d1(x0);
    double u1 = -0.5 * a * std::log(fp_x / fp_x0);
    u1 += 0.5 * sig * a * d2(x0) * inv_cube;
    u1 -= 0.25 * sig * a * (1.0 / (fp_x0 * fp_x0) - 1.0 / (fp_x * fp_x));
    u1 += 0.5 * sig * fp_x0 * fp_x0 * phi.d2(x0) * inv_cube;
    return u1;
}

double u1_numeric(const Family& fam, const TestFunction& phi, double x, double t,
                  const QuadSettings& quad)
{
    require_third_derivative(fam);
    const QuadRule& rule = gauss_legendre(5);
    const int panels = std::max(1, quad.duhamel_panels);

    // All quadrature nodes in ascending order, then one forward flow pass.
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(panels) * rule.nodes.size());
    const double h = t / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (double z : rule.nodes) nodes.push_back(mid + 0.5 * h * z);
    }
    const std::vector<double> ys = flow_at_times(fam, x, nodes);

    double total = 0.0;
    std::size_t idx = 0;
    for (int p = 0; p < panels; ++p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i, ++idx) {
            const double s = nodes[idx];
            const double z = ys[idx];
            const U0Derivatives d = u0_with_derivatives(fam, phi, z, t - s);
            acc += rule.weights[i] * apply_l2(fam, z, d.d1, d.d2);
        }
        total += acc * 0.5 * h;
    }
    return total;
}

} // namespace

double u1_eval(const Family& fam, const TestFunction& phi, double x, double t, EvalMethod method,
               const QuadSettings& quad)
{
    if (t == 0.0) return 0.0;
    switch (resolve_method(fam, t, method)) {
    case EvalMethod::closed_form: return u1_closed_form(fam, phi, x, t);
    default: return u1_numeric(fam, phi, x, t, quad);
    }
}

ExpansionEvaluation truncated_series(const Family& fam, const TestFunction& phi, double x,
                                     double t, double eta, EvalMethod method,
                                     const QuadSettings& quad)
{
    const EvalMethod m = resolve_method(fam, t, method);
    ExpansionEvaluation ev;
    ev.method = m;
    ev.x = x;
    ev.t = t;
    ev.eta = eta;
    ev.u0 = u0_eval(fam, phi, x, t, m);
    ev.u1 = u1_eval(fam, phi, x, t, m, quad);
    ev.u_trunc = ev.u0 + eta * ev.u1;
    return ev;
}

Phi1Result phi1_limit(const Family& fam, const TestFunction& phi, double t_max,
                      const QuadSettings& quad)
{
    require_third_derivative(fam);
    const double xs = fam.objective.minimizer;
    const double curv = fam.objective.d2(xs);
    if (!(curv > 0.0)) throw ExpansionError("minimizer is not strongly convex");
    if (t_max <= 0.0) t_max = 20.0 / curv;

    auto integrand = [&](double s) {
        const U0Derivatives d = u0_with_derivatives(fam, phi, xs, s);
        return apply_l2(fam, xs, d.d1, d.d2);
    };
    Phi1Result r;
    r.t_max = t_max;
    r.value = composite_gauss_legendre(0.0, t_max, std::max(1, quad.duhamel_panels), 5, integrand);
    r.tail_bound = std::abs(integrand(t_max)) / (2.0 * curv);
    return r;
}

double pair_with_initial_measure(const Family& fam, const TestFunction& phi,
                                 const std::vector<double>& atoms,
                                 const std::vector<double>& weights, double t, double eta,
                                 double ball_center, double ball_radius, EvalMethod method)
{
    if (atoms.empty() || atoms.size() != weights.size())
        throw std::invalid_argument("initial measure needs matching atoms/weights");
    double total_w = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (std::abs(atoms[i] - ball_center) > ball_radius)
            throw ExpansionError("support outside ball");
        if (weights[i] < 0.0) throw std::invalid_argument("negative weight");
        total_w += weights[i];
    }
    if (total_w <= 0.0) throw std::invalid_argument("initial measure has zero mass");
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        acc += weights[i] * truncated_series(fam, phi, atoms[i], t, eta, method).u_trunc;
    return acc / total_w;
}

} // namespace sgdlab
