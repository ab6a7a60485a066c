#include "sgdlab/examples.hpp"

#include "sgdlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace sgdlab {

namespace {

void attach_rademacher_noise(Family& fam)
{
    fam.noise_kind = NoiseKind::rademacher;
    const auto d1 = fam.objective.d1;
    const auto d2 = fam.objective.d2;
    fam.grad_xi = [d1](double x, double xi) { return d1(x) + 0.5 * xi; };
    fam.hess_xi = [d2](double x, double) { return d2(x); };
    fam.draw_scalar = [](StepRng& rng) { return static_cast<double>(rng.rademacher()); };
    auto g = fam.grad_xi;
    fam.grad_atom = [g](double x, const NoiseAtom& a) { return g(x, a.scalar); };
    fam.draw_atom = [](StepRng& rng) {
        NoiseAtom a;
        a.scalar = static_cast<double>(rng.rademacher());
        return a;
    };
    fam.support = {{NoiseAtom{-1.0, {}}, 0.5}, {NoiseAtom{+1.0, {}}, 0.5}};
    fam.sigma = [](double) { return 0.25; }; // Var(xi/2), xi = +-1
}

} // namespace

Family make_example1()
{
    Family fam;
    fam.id = "example1";
    fam.objective.f = [](double x) { return 0.5 * x * x - 0.5 * x; };
    fam.objective.d1 = [](double x) { return x - 0.5; };
    fam.objective.d2 = [](double) { return 1.0; };
    fam.objective.d3 = [](double) { return 0.0; };
    fam.objective.minimizer = 0.5;
    attach_rademacher_noise(fam);
    fam.char_intercept = [](double x, double t) { return 0.5 + (x - 0.5) * std::exp(-t); };
    return fam;
}

Family make_example2()
{
    Family fam;
    fam.id = "example2";
    fam.objective.f = [](double x) { return 0.5 * x * x + 0.1 * x * x * x; };
    fam.objective.d1 = [](double x) { return x + 0.3 * x * x; };
    fam.objective.d2 = [](double x) { return 1.0 + 0.6 * x; };
    fam.objective.d3 = [](double) { return 0.6; };
    fam.objective.minimizer = 0.0;
    attach_rademacher_noise(fam);
    // Solve dy/dt = -y(1 + 0.3y): y/(1+0.3y) decays as e^{-t}.
    fam.char_intercept = [](double x, double t) {
        const double w = x * std::exp(-t) / (1.0 + 0.3 * x);
        return w / (1.0 - 0.3 * w);
    };
    return fam;
}

Family make_ou_family()
{
    Family fam;
    fam.id = "ou";
    fam.noise_kind = NoiseKind::custom;
    fam.objective.f = [](double x) { return 0.5 * x * x; };
    fam.objective.d1 = [](double x) { return x; };
    fam.objective.d2 = [](double) { return 1.0; };
    fam.objective.d3 = [](double) { return 0.0; };
    fam.objective.minimizer = 0.0;
    fam.grad_xi = [](double x, double xi) { return x + xi; };
    fam.hess_xi = [](double, double) { return 1.0; };
    fam.draw_scalar = [](StepRng& rng) { return rng.gaussian(); };
    fam.grad_atom = [](double x, const NoiseAtom& a) { return x + a.scalar; };
    fam.draw_atom = [](StepRng& rng) {
        NoiseAtom a;
        a.scalar = rng.gaussian();
        return a;
    };
    fam.sigma = [](double) { return 1.0; };
    fam.char_intercept = [](double x, double t) { return x * std::exp(-t); };
    // The benchmark SDE is dX = -(1+2 eta) X dt + sqrt(eta) dW, specified
    // directly; it is not the assembled modified equation of this objective.
    fam.sde_drift = [](double x, double eta) { return -(1.0 + 2.0 * eta) * x; };
    return fam;
}

OuReference make_ou_reference(double eta)
{
    if (!(eta > 0.0)) throw std::invalid_argument("make_ou_reference: eta must be positive");
    OuReference ref;
    ref.family = make_ou_family();
    ref.eta = eta;
    ref.expectation = [eta](const TestFunction& phi, double x, double t) {
        return ou_exact(phi, x, t, eta);
    };
    return ref;
}

Family make_minibatch_family(std::vector<Component> components, int batch_size, double minimizer)
{
    const int n = static_cast<int>(components.size());
    if (n < 1 || batch_size < 1 || batch_size > n)
        throw std::invalid_argument("make_minibatch_family: bad component/batch sizes");
    auto comps = std::make_shared<std::vector<Component>>(std::move(components));

    Family fam;
    fam.id = "minibatch";
    fam.noise_kind = NoiseKind::minibatch;
    fam.objective.f = [comps, n](double x) {
        double s = 0;
        for (const auto& c : *comps) s += c.f(x);
        return s / n;
    };
    fam.objective.d1 = [comps, n](double x) {
        double s = 0;
        for (const auto& c : *comps) s += c.d1(x);
        return s / n;
    };
    fam.objective.d2 = [comps, n](double x) {
        double s = 0;
        for (const auto& c : *comps) s += c.d2(x);
        return s / n;
    };
    fam.objective.minimizer = minimizer;

    fam.grad_atom = [comps](double x, const NoiseAtom& a) {
        double s = 0;
        for (int j : a.batch) s += (*comps)[static_cast<std::size_t>(j)].d1(x);
        return s / static_cast<double>(a.batch.size());
    };
    fam.hess_atom = [comps](double x, const NoiseAtom& a) {
        double s = 0;
        for (int j : a.batch) s += (*comps)[static_cast<std::size_t>(j)].d2(x);
        return s / static_cast<double>(a.batch.size());
    };
    // Partial Fisher-Yates: uniform batch without replacement.
    fam.draw_atom = [n, batch_size](StepRng& rng) {
        std::vector<std::int32_t> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        NoiseAtom a;
        a.batch.resize(static_cast<std::size_t>(batch_size));
        for (int j = 0; j < batch_size; ++j) {
            const std::uint32_t k = rng.below(static_cast<std::uint32_t>(n - j));
            std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(j) + k]);
            a.batch[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j)];
        }
        return a;
    };
    // All size-B subsets, equiprobable.
    {
        std::vector<std::pair<NoiseAtom, double>> support;
        std::vector<std::int32_t> pick(static_cast<std::size_t>(batch_size));
        std::function<void(int, int)> rec = [&](int start, int depth) {
            if (depth == batch_size) {
                NoiseAtom a;
                a.batch = pick;
                support.push_back({a, 0.0});
                return;
            }
            for (int j = start; j < n; ++j) {
                pick[static_cast<std::size_t>(depth)] = j;
                rec(j + 1, depth + 1);
            }
        };
        rec(0, 0);
        for (auto& [atom, p] : support) p = 1.0 / static_cast<double>(support.size());
        fam.support = std::move(support);
    }
    // Finite-population variance of the batch mean of the component gradients.
    const auto d1 = fam.objective.d1;
    fam.sigma = [comps, n, batch_size, d1](double x) {
        const double mean = d1(x);
        double pop_var = 0;
        for (const auto& c : *comps) {
            const double d = c.d1(x) - mean;
            pop_var += d * d;
        }
        pop_var /= n;
        if (n == 1) return 0.0;
        return pop_var / batch_size * (static_cast<double>(n - batch_size) / (n - 1));
    };
    return fam;
}

Family make_noiseless(const Family& fam)
{
    Family out = fam;
    out.id = fam.id + "-noiseless";
    out.noise_kind = NoiseKind::custom;
    const auto d1 = fam.objective.d1;
    const auto d2 = fam.objective.d2;
    out.grad_xi = [d1](double x, double) { return d1(x); };
    out.hess_xi = [d2](double x, double) { return d2(x); };
    out.draw_scalar = [](StepRng&) { return 0.0; };
    out.grad_atom = [d1](double x, const NoiseAtom&) { return d1(x); };
    out.hess_atom = {};
    out.draw_atom = [](StepRng&) { return NoiseAtom{}; };
    out.support = {{NoiseAtom{0.0, {}}, 1.0}};
    out.sigma = [](double) { return 0.0; };
    out.sde_drift = {};
    return out;
}

namespace {

std::map<std::string, RegistryEntry> build_registry()
{
    std::map<std::string, RegistryEntry> reg;
    {
        RegistryEntry e;
        e.family = make_example1();
        e.R = 3.0;
        e.R1 = 3.0;
        e.certificate = certify(e.family, e.R, e.R1);
        e.constants = measure_local_constants(e.family, e.R);
        reg.emplace("example1", std::move(e));
    }
    {
        RegistryEntry e;
        e.family = make_example2();
        e.R = 1.0;
        e.R1 = 1.5; // f'' > 0 up to x = -5/3; stay inside with margin
        e.constants = measure_local_constants(e.family, e.R);
        e.note = "confinement radius condition fails: R0 = " + std::to_string(e.constants.R0) +
                 " exceeds every radius on which f(.;xi) stays strongly convex";
        reg.emplace("example2", std::move(e));
    }
    {
        RegistryEntry e;
        e.family = make_ou_family();
        e.R = 4.0;
        e.R1 = 4.0;
        e.constants = measure_local_constants(e.family, e.R);
        e.note = "Gaussian gradient noise is unbounded; b is an empirical supremum and "
                 "the confinement radius condition fails";
        reg.emplace("ou", std::move(e));
    }
    return reg;
}

const std::map<std::string, RegistryEntry>& registry()
{
    static const std::map<std::string, RegistryEntry> reg = build_registry();
    return reg;
}

} // namespace

const std::vector<std::string>& registry_ids()
{
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& [id, e] : registry()) v.push_back(id);
        return v;
    }();
    return ids;
}

bool registry_has(const std::string& id) { return registry().count(id) > 0; }

const RegistryEntry& registry_get(const std::string& id)
{
    auto it = registry().find(id);
    if (it == registry().end()) throw std::invalid_argument("unknown family id: " + id);
    return it->second;
}

const std::vector<std::string>& observable_names()
{
    static const std::vector<std::string> names = {"sin", "cos", "identity", "square", "f"};
    return names;
}

TestFunction observable(const std::string& name, const Family& fam)
{
    TestFunction t;
    t.name = name;
    if (name == "sin") {
        t.phi = [](double x) { return std::sin(x); };
        t.d1 = [](double x) { return std::cos(x); };
        t.d2 = [](double x) { return -std::sin(x); };
        t.d3 = [](double x) { return -std::cos(x); };
    } else if (name == "cos") {
        t.phi = [](double x) { return std::cos(x); };
        t.d1 = [](double x) { return -std::sin(x); };
        t.d2 = [](double x) { return -std::cos(x); };
        t.d3 = [](double x) { return std::sin(x); };
    } else if (name == "identity") {
        t.phi = [](double x) { return x; };
        t.d1 = [](double) { return 1.0; };
        t.d2 = [](double) { return 0.0; };
        t.d3 = [](double) { return 0.0; };
    } else if (name == "square") {
        t.phi = [](double x) { return x * x; };
        t.d1 = [](double x) { return 2.0 * x; };
        t.d2 = [](double) { return 2.0; };
        t.d3 = [](double) { return 0.0; };
    } else if (name == "f") {
        t.phi = fam.objective.f;
        t.d1 = fam.objective.d1;
        t.d2 = fam.objective.d2;
        t.d3 = fam.objective.has_d3() ? fam.objective.d3 : ScalarFn{};
    } else {
        throw std::invalid_argument("unknown observable: " + name);
    }
    return t;
}

} // namespace sgdlab
