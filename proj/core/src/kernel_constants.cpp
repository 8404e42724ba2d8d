#include "hazval/kernel_constants.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hazval/errors.hpp"
#include "hazval/quadrature.hpp"

namespace hazval {

namespace {

// Piecewise Chebyshev interpolant on the pieces delimited by the given
// breakpoints. Sampling nodes are strictly interior, so one-sided limits at
// jump discontinuities are never mixed; with degree >= the piece polynomial
// degree the proxy is exact, and evaluation is much cheaper than the
// quadrature-backed twicing kernels it stands in for.
class ChebProxy {
  public:
    template <typename F>
    ChebProxy(F&& f, std::vector<double> cuts, int degree)
        : cuts_(std::move(cuts)), degree_(degree) {
        const int n = degree_ + 1;
        const double pi = 3.14159265358979323846;
        std::vector<double> nodes(n), vals(n);
        for (int k = 0; k < n; ++k) nodes[k] = std::cos(pi * (k + 0.5) / n);
        coeffs_.resize(cuts_.size() - 1);
        for (std::size_t p = 0; p + 1 < cuts_.size(); ++p) {
            const double mid = 0.5 * (cuts_[p] + cuts_[p + 1]);
            const double half = 0.5 * (cuts_[p + 1] - cuts_[p]);
            for (int k = 0; k < n; ++k) vals[k] = f(mid + half * nodes[k]);
            auto& c = coeffs_[p];
            c.resize(n);
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k)
                    acc += vals[k] * std::cos(pi * j * (k + 0.5) / n);
                c[j] = 2.0 / n * acc;
            }
            c[0] *= 0.5;
        }
    }

    double operator()(double x) const {
        if (x <= cuts_.front() || x >= cuts_.back()) return 0.0;
        const auto it = std::upper_bound(cuts_.begin(), cuts_.end(), x);
        const auto p = static_cast<std::size_t>(it - cuts_.begin()) - 1;
        const double mid = 0.5 * (cuts_[p] + cuts_[p + 1]);
        const double half = 0.5 * (cuts_[p + 1] - cuts_[p]);
        const double t = (x - mid) / half;
        // Clenshaw recurrence
        double b1 = 0.0, b2 = 0.0;
        const auto& c = coeffs_[p];
        for (int j = degree_; j >= 1; --j) {
            const double b0 = 2.0 * t * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c[0];
    }

  private:
    std::vector<double> cuts_;
    int degree_;
    std::vector<std::vector<double>> coeffs_;
};

struct PsiParts {
    ChebProxy m;      // the effective kernel M
    ChebProxy m1;     // M1(u) = -M(u) - u M'(u)
    double lo, hi;
    std::vector<double> cuts;
};

PsiParts make_parts(const Kernel& m) {
    std::vector<double> cuts = m.breakpoints();
    const int degree = 40;
    return PsiParts{ChebProxy([&](double u) { return m(u); }, cuts, degree),
                    ChebProxy([&](double u) { return -m(u) - u * m.deriv(u); }, cuts, degree),
                    m.lo(), m.hi(), cuts};
}

double g_value(const PsiParts& p, double w) { return 2.0 * p.m1(w); }

// H_M(w) = int M(u) {M1(u+w) + M1(u-w)} du
double h_value(const PsiParts& p, double w) {
    std::vector<double> cuts = p.cuts;
    for (double x : p.cuts) {
        cuts.push_back(x - w);
        cuts.push_back(x + w);
    }
    return integrate_panels([&](double u) { return p.m(u) * (p.m1(u + w) + p.m1(u - w)); },
                            p.lo, p.hi, cuts, 30);
}

// Breakpoints of H_M in w: pairwise differences/sums of kernel breakpoints.
std::vector<double> h_cuts(const PsiParts& p) {
    std::vector<double> out;
    for (double x : p.cuts)
        for (double y : p.cuts) {
            out.push_back(x - y);
            out.push_back(y - x);
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct EffectiveKernels {
    Kernel sym;              // M_K
    Kernel left;             // M_L, from the left one-sided kernel
    double roughness_ratio;  // R(M_K) / R(M_L)
    double rho;
};

EffectiveKernels effective_kernels(EstimatorFamily family, const Kernel& kernel) {
    Kernel sym = equivalent_local_linear(kernel);
    Kernel left = equivalent_local_linear(one_sided(kernel, Side::left));
    if (family == EstimatorFamily::MBC) {
        sym = twicing(sym);
        left = twicing(left);
    }
    const double c = moments(sym).roughness_R / moments(left).roughness_R;
    return {std::move(sym), std::move(left), c, rho_factor(family, kernel)};
}

}  // namespace

double rho_ll(const Kernel& kernel) {
    const Kernel left = equivalent_local_linear(one_sided(kernel, Side::left));
    const KernelMoments mk = moments(kernel);
    const KernelMoments ml = moments(left);
    return std::pow(mk.roughness_R / ml.roughness_R * ml.mu2 * ml.mu2 / (mk.mu2 * mk.mu2),
                    0.2);
}

double rho_mbc(const Kernel& kernel) {
    const Kernel left = equivalent_local_linear(one_sided(kernel, Side::left));
    const KernelMoments mk = moments(kernel);
    const KernelMoments ml = moments(left);
    const double r_gamma_k = moments(twicing(equivalent_local_linear(kernel))).roughness_R;
    const double r_gamma_l = moments(twicing(left)).roughness_R;
    const double mu_ratio = std::pow(ml.mu2 / mk.mu2, 4);
    return std::pow(r_gamma_k / r_gamma_l * mu_ratio, 1.0 / 9.0);
}

double rho_factor(EstimatorFamily family, const Kernel& kernel) {
    return family == EstimatorFamily::LL ? rho_ll(kernel) : rho_mbc(kernel);
}

double psi_factor(PsiMethod method, EstimatorFamily family, const Kernel& kernel) {
    if (!kernel.is_symmetric()) throw validation_error("psi_factor: kernel must be symmetric");
    const EffectiveKernels eff = effective_kernels(family, kernel);
    const PsiParts sym = make_parts(eff.sym);

    if (method == PsiMethod::CV)
        return integrate_adaptive([&](double u) { const double g = g_value(sym, u); return g * g; },
                                  sym.lo, sym.hi, sym.cuts, 1e-7);

    const std::vector<double> sym_h_cuts = h_cuts(sym);
    const double width_k = sym.hi - sym.lo;
    if (method == PsiMethod::MISE)
        return integrate_adaptive([&](double u) { const double h = h_value(sym, u); return h * h; },
                                  -width_k, width_k, sym_h_cuts, 1e-7);

    // BO and DO share one formula. The side average uses that H is even, so
    // the left and right one-sided terms differ only through G, where the
    // right-sided construction mirrors the left: G_R(w) = G_L(-w).
    const PsiParts left = make_parts(eff.left);
    const double width_l = left.hi - left.lo;
    const double s = std::max(width_k, width_l / eff.rho);
    std::vector<double> cuts = sym_h_cuts;
    for (double x : h_cuts(left)) cuts.push_back(x / eff.rho);
    for (double x : left.cuts) {
        cuts.push_back(x / eff.rho);
        cuts.push_back(-x / eff.rho);
    }
    auto diff = [&](double u) {
        const double v = eff.rho * u;
        const double side_avg = h_value(left, v) - 0.5 * (g_value(left, v) + g_value(left, -v));
        const double d = eff.roughness_ratio * side_avg - h_value(sym, u);
        return d * d;
    };
    return integrate_adaptive(diff, -s, s, cuts, 1e-7);
}

}  // namespace hazval
