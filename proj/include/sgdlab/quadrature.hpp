#pragma once

#include <functional>
#include <vector>

namespace sgdlab {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1,1] (Golub-Welsch).
const QuadRule& gauss_legendre(int n);

// Gauss-Hermite rule for weight e^{-z^2} on (-inf,inf) (physicists'
// convention; weights sum to sqrt(pi)).
const QuadRule& gauss_hermite(int n);

// Composite fixed-panel Gauss-Legendre integration of f over [a,b].
double composite_gauss_legendre(double a, double b, int panels, int nodes_per_panel,
                                const std::function<double(double)>& f);

// Globally adaptive Gauss-Kronrod 7-15 integration. Handles a > b with the
// usual sign convention. Throws on failure to converge.
double adaptive_gauss_kronrod(double a, double b, double abs_tol, double rel_tol,
                              const std::function<double(double)>& f);

} // namespace sgdlab
