#pragma once

#include "sgdlab/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sgdlab {

// f(x) = x^2/2 - x/2 with f(x;xi) = f(x) + xi*x/2, xi Rademacher.
// Minimum 1/2, Sigma(x) = 1/4, linear characteristic flow.
Family make_example1();

// f(x) = x^2/2 + 0.1 x^3, same Rademacher noise. Local minimum 0.
Family make_example2();

// Ornstein-Uhlenbeck benchmark: f(x) = x^2/2, Sigma = 1, Gaussian gradient
// noise, and an explicitly registered SDE drift -(1+2 eta) x whose
// backward-equation solution is the closed-form Gaussian expectation
// evaluated by ou_exact.
Family make_ou_family();

struct OuReference {
    Family family;
    double eta;
    // Closed-form E_x[phi(X_t)] of the benchmark SDE (Gauss-Hermite).
    std::function<double(const TestFunction&, double x, double t)> expectation;
};
OuReference make_ou_reference(double eta);

// Mini-batch family over scalar components: gradients are means over a
// uniformly-without-replacement batch of the component gradients.
struct Component {
    ScalarFn f;
    ScalarFn d1;
    ScalarFn d2;
};
Family make_minibatch_family(std::vector<Component> components, int batch_size, double minimizer);

// Noise-free variant (b = 0, Sigma = 0) for descent-time baselines.
Family make_noiseless(const Family& fam);

struct RegistryEntry {
    Family family;
    double R = 0.0;  // working radius
    double R1 = 0.0; // convexity radius
    std::optional<ConvexityCertificate> certificate;
    LocalConstants constants;
    std::string note; // why no confinement certificate, when absent
};

const std::vector<std::string>& registry_ids();
bool registry_has(const std::string& id);
const RegistryEntry& registry_get(const std::string& id);

// Named observables: sin, cos, identity, square, f (the family objective).
const std::vector<std::string>& observable_names();
TestFunction observable(const std::string& name, const Family& fam);

} // namespace sgdlab
