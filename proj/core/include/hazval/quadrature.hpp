#pragma once

#include <functional>
#include <vector>

namespace hazval {

// Gauss-Legendre rule on [-1,1]; nodes/weights are computed once per order
// (Newton iteration on Legendre polynomials) and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre_rule(int order);

// Fixed-order Gauss-Legendre integral over [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int order = 30);

// Integral over [a, b] with the interval split at the given interior
// breakpoints; one fixed-order panel per subinterval. Exact for piecewise
// polynomials of degree < 2*order whose pieces align with the breakpoints.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& breakpoints, int order = 30);

// Adaptive panel-doubling quadrature: starts from the breakpoint-aligned
// panels and doubles the panel count until two successive estimates agree
// within tol (absolute + relative). Throws numeric_error on non-convergence.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breakpoints, double tol,
                          int order = 30);

}  // namespace hazval
