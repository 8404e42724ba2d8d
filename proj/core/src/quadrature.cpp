#include "hazval/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "hazval/errors.hpp"

namespace hazval {

namespace {

GaussRule compute_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n(x) = 0.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre_rule(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int order) {
    const GaussRule& rule = gauss_legendre_rule(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

namespace {

std::vector<double> panel_edges(double a, double b, const std::vector<double>& breakpoints) {
    std::vector<double> edges{a};
    for (double x : breakpoints)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

double integrate_refined(const std::function<double(double)>& f,
                         const std::vector<double>& edges, int splits, int order) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        const double h = (hi - lo) / splits;
        for (int k = 0; k < splits; ++k)
            acc += gauss_legendre(f, lo + k * h, lo + (k + 1) * h, order);
    }
    return acc;
}

}  // namespace

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& breakpoints, int order) {
    if (b <= a) return 0.0;
    return integrate_refined(f, panel_edges(a, b, breakpoints), 1, order);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breakpoints, double tol,
                          int order) {
    if (b <= a) return 0.0;
    const std::vector<double> edges = panel_edges(a, b, breakpoints);
    double prev = integrate_refined(f, edges, 1, order);
    for (int splits = 2; splits <= 1 << 12; splits *= 2) {
        const double cur = integrate_refined(f, edges, splits, order);
        if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw numeric_error("adaptive quadrature failed to converge");
}

}  // namespace hazval
