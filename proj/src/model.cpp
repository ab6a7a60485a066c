#include "sgdlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sgdlab {

VecObjective as_vec(const Objective1D& o)
{
    VecObjective v;
    v.dim = 1;
    v.f = [o](const Eigen::VectorXd& x) { return o.f(x[0]); };
    v.grad = [o](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(1);
        g[0] = o.d1(x[0]);
        return g;
    };
    v.hess = [o](const Eigen::VectorXd& x) {
        Eigen::MatrixXd h(1, 1);
        h(0, 0) = o.d2(x[0]);
        return h;
    };
    v.minimizer = Eigen::VectorXd::Constant(1, o.minimizer);
    return v;
}

Family recenter(const Family& fam)
{
    const double c = fam.objective.minimizer;
    if (c == 0.0) return fam;
    Family out = fam;
    out.id = fam.id + "@origin";
    const Objective1D& o = fam.objective;
    out.objective.f = [o, c](double z) { return o.f(z + c); };
    out.objective.d1 = [o, c](double z) { return o.d1(z + c); };
    out.objective.d2 = [o, c](double z) { return o.d2(z + c); };
    if (o.has_d3()) out.objective.d3 = [o, c](double z) { return o.d3(z + c); };
    out.objective.minimizer = 0.0;
    {
        auto g = fam.grad_xi;
        out.grad_xi = [g, c](double z, double xi) { return g(z + c, xi); };
    }
    {
        auto h = fam.hess_xi;
        out.hess_xi = [h, c](double z, double xi) { return h(z + c, xi); };
    }
    {
        auto g = fam.grad_atom;
        out.grad_atom = [g, c](double z, const NoiseAtom& a) { return g(z + c, a); };
    }
    if (fam.hess_atom) {
        auto h = fam.hess_atom;
        out.hess_atom = [h, c](double z, const NoiseAtom& a) { return h(z + c, a); };
    }
    {
        auto s = fam.sigma;
        out.sigma = [s, c](double z) { return s(z + c); };
    }
    if (fam.char_intercept) {
        auto x0 = fam.char_intercept;
        out.char_intercept = [x0, c](double z, double t) { return x0(z + c, t) - c; };
    }
    if (fam.sde_drift) {
        auto d = fam.sde_drift;
        out.sde_drift = [d, c](double z, double eta) { return d(z + c, eta); };
    }
    return out;
}

double confinement_eta0(double gamma, double b, double R)
{
    double eta0 = 1.0 / (2.0 * gamma);
    if (b > 0.0) {
        eta0 = std::min(eta0, 3.0 * R / (8.0 * b));
        const double num = 3.0 * gamma * R * R / 8.0 - 2.0 * b * R;
        const double den = 2.0 * gamma * b * R + b * b;
        eta0 = std::min(eta0, num / den);
    }
    return eta0;
}

namespace {

constexpr int kGridPoints = 201;
constexpr int kNoiseDraws = 10000;
constexpr std::uint64_t kMeasureSeed = 0x5eedc0de;

// Apply fn to every noise token: full support when finite, kNoiseDraws
// pseudo-draws otherwise. Returns whether the sweep was exhaustive.
bool for_each_token(const Family& fam, const std::function<void(const NoiseAtom&)>& fn)
{
    if (fam.enumerable()) {
        for (const auto& [atom, p] : fam.support) fn(atom);
        return true;
    }
    for (int i = 0; i < kNoiseDraws; ++i) {
        StepRng rng(kMeasureSeed, 0, static_cast<std::uint64_t>(i));
        fn(fam.draw_atom(rng));
    }
    return false;
}

} // namespace

LocalConstants measure_local_constants(const Family& fam, double R)
{
    const Family rec = recenter(fam);
    LocalConstants c;
    c.b_estimated = !for_each_token(rec, [&](const NoiseAtom& atom) {
        c.b = std::max(c.b, std::abs(rec.grad_atom(0.0, atom)));
    });

    double min_eig = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    for_each_token(rec, [&](const NoiseAtom& atom) {
        for (int i = 0; i < kGridPoints; ++i) {
            const double z = -R + 2.0 * R * i / (kGridPoints - 1);
            double h;
            if (rec.hess_atom)
                h = rec.hess_atom(z, atom);
            else if (rec.hess_xi)
                h = rec.hess_xi(z, atom.scalar);
            else
                h = rec.objective.d2(z);
            min_eig = std::min(min_eig, h);
            max_abs = std::max(max_abs, std::abs(h));
        }
    });
    c.gamma = min_eig;
    c.L = max_abs;
    c.R0 = c.gamma > 0.0 ? 16.0 * c.b / (3.0 * c.gamma) : std::numeric_limits<double>::infinity();
    return c;
}

ConvexityCertificate certify(const Family& fam, double R, double R1)
{
    if (!(R > 0.0) || R > R1) throw CertifyError("invalid radii: need 0 < R <= R1");
    const LocalConstants c = measure_local_constants(fam, R);
    if (!(c.gamma > 0.0)) throw CertifyError("not locally strongly convex");
    if (R <= c.R0) throw CertifyError("radius too small");
    ConvexityCertificate cert;
    cert.gamma = c.gamma;
    cert.b = c.b;
    cert.L = c.L;
    cert.R1 = R1;
    cert.R = R;
    cert.R0 = c.R0;
    cert.eta0 = confinement_eta0(c.gamma, c.b, R);
    cert.b_estimated = c.b_estimated;
    return cert;
}

} // namespace sgdlab
