#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hazval/piecewise.hpp"

namespace hazval {

// Side convention: a "left" one-sided kernel concentrates on u < 0 (paper
// scale u = s - t, i.e. data window [t-b, t]); a "right" kernel on u > 0.
enum class Side { left, right };

struct KernelMoments {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double roughness_R = 0.0;
};

// A normalized kernel with compact support. Built-in and derived kernels are
// exact piecewise polynomials; twicing kernels additionally carry their base
// kernel and evaluate the self-convolution term by per-panel Gauss-Legendre
// quadrature (exact, since the integrands are polynomial on each panel).
class Kernel {
  public:
    enum class Kind { epanechnikov, quartic, sextic, one_sided, equivalent, twicing, custom };

    static Kernel epanechnikov();
    static Kernel quartic();
    static Kernel sextic();
    // Validates unit mass (1e-8).
    static Kernel custom(PiecewisePoly poly, std::string name = "custom");

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double operator()(double u) const;
    double deriv(double u) const;

    // Points where the kernel (or its derivative) may be non-smooth.
    const std::vector<double>& breakpoints() const { return breaks_; }

    bool is_polynomial() const { return !tw_; }
    const PiecewisePoly& poly() const { return poly_; }  // valid iff is_polynomial()

    bool is_symmetric() const;

    friend KernelMoments moments(const Kernel& k);
    friend Kernel one_sided(const Kernel& k, Side side);
    friend Kernel equivalent_local_linear(const Kernel& k);
    friend Kernel twicing(const Kernel& k);
    friend Kernel reflect(const Kernel& k);

  private:
    struct TwicingData {
        PiecewisePoly base;        // the kernel L in Gamma = 2L - L*L
        PiecewisePoly base_deriv;
        std::vector<std::pair<double, double>> base_jumps;
        int gl_order = 30;
    };

    Kernel(Kind kind, std::string name, PiecewisePoly poly);
    Kernel(Kind kind, std::string name, PiecewisePoly two_l,
           std::shared_ptr<const TwicingData> tw, double lo, double hi,
           std::vector<double> breaks);

    double convolution(double t) const;        // (L*L)(t)
    double convolution_deriv(double t) const;  // d/dt (L*L)(t)

    Kind kind_;
    std::string name_;
    PiecewisePoly poly_;   // full kernel if polynomial, else the 2L term
    PiecewisePoly dpoly_;  // piecewise derivative of poly_
    std::shared_ptr<const TwicingData> tw_;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> breaks_;
};

// mu0, mu1, mu2 and roughness R = int k^2; exact for polynomial kernels,
// panel-exact quadrature for twicing kernels.
KernelMoments moments(const Kernel& k);

// 2 K(u) restricted to one half-line. Requires a symmetric kernel.
Kernel one_sided(const Kernel& k, Side side);

// Lbar*(u) = {mu2 - mu1 u} / {mu2 - mu1^2} * L(u)
Kernel equivalent_local_linear(const Kernel& k);

// Gamma_L(u) = 2 L(u) - (L*L)(u)
Kernel twicing(const Kernel& k);

// k(-u)
Kernel reflect(const Kernel& k);

}  // namespace hazval
