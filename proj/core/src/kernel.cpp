#include "hazval/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "hazval/errors.hpp"
#include "hazval/quadrature.hpp"

namespace hazval {

namespace {

PiecewisePoly symmetric_polynomial(const Poly& p) {
    return PiecewisePoly({{-1.0, 1.0, p}});
}

Poly one_minus_u2_pow(int n, double scale) {
    Poly base({1.0, 0.0, -1.0});
    Poly acc = Poly::constant(scale);
    for (int i = 0; i < n; ++i) acc = acc * base;
    return acc;
}

int max_degree(const PiecewisePoly& pp) {
    int d = 0;
    for (const auto& piece : pp.pieces()) d = std::max<int>(d, static_cast<int>(piece.poly.degree()));
    return d;
}

}  // namespace

Kernel::Kernel(Kind kind, std::string name, PiecewisePoly poly)
    : kind_(kind), name_(std::move(name)), poly_(std::move(poly)) {
    lo_ = poly_.lo();
    hi_ = poly_.hi();
    breaks_ = poly_.breakpoints();
    dpoly_ = poly_.derivative();
}

Kernel::Kernel(Kind kind, std::string name, PiecewisePoly two_l,
               std::shared_ptr<const TwicingData> tw, double lo, double hi,
               std::vector<double> breaks)
    : kind_(kind),
      name_(std::move(name)),
      poly_(std::move(two_l)),
      tw_(std::move(tw)),
      lo_(lo),
      hi_(hi),
      breaks_(std::move(breaks)) {
    dpoly_ = poly_.derivative();
}

Kernel Kernel::epanechnikov() {
    return Kernel(Kind::epanechnikov, "epanechnikov",
                  symmetric_polynomial(one_minus_u2_pow(1, 0.75)));
}

Kernel Kernel::quartic() {
    return Kernel(Kind::quartic, "quartic",
                  symmetric_polynomial(one_minus_u2_pow(2, 15.0 / 16.0)));
}

Kernel Kernel::sextic() {
    return Kernel(Kind::sextic, "sextic",
                  symmetric_polynomial(one_minus_u2_pow(6, 3003.0 / 2048.0)));
}

Kernel Kernel::custom(PiecewisePoly poly, std::string name) {
    if (poly.pieces().empty()) throw validation_error("custom kernel: empty support");
    const double mass = poly.moment(0);
    if (std::abs(mass - 1.0) > 1e-8)
        throw validation_error("custom kernel: density must integrate to 1");
    return Kernel(Kind::custom, std::move(name), std::move(poly));
}

double Kernel::operator()(double u) const {
    if (u < lo_ || u > hi_) return 0.0;
    if (!tw_) return poly_(u);
    return poly_(u) - convolution(u);
}

double Kernel::deriv(double u) const {
    if (u < lo_ || u > hi_) return 0.0;
    if (!tw_) return dpoly_(u);
    return dpoly_(u) - convolution_deriv(u);
}

bool Kernel::is_symmetric() const {
    if (std::abs(lo_ + hi_) > 1e-12) return false;
    double scale = 1e-12;
    for (int i = 0; i <= 16; ++i) {
        const double u = hi_ * i / 16.0;
        if (std::abs((*this)(u) - (*this)(-u)) > scale * (1.0 + std::abs((*this)(u))))
            return false;
    }
    return true;
}

double Kernel::convolution(double t) const {
    const PiecewisePoly& base = tw_->base;
    const double a = std::max(base.lo(), t - base.hi());
    const double b = std::min(base.hi(), t - base.lo());
    if (b <= a) return 0.0;
    std::vector<double> cuts = base.breakpoints();
    for (double x : base.breakpoints()) cuts.push_back(t - x);
    return integrate_panels([&](double v) { return base(v) * base(t - v); }, a, b, cuts,
                            tw_->gl_order);
}

double Kernel::convolution_deriv(double t) const {
    const PiecewisePoly& base = tw_->base;
    const PiecewisePoly& dbase = tw_->base_deriv;
    const double a = std::max(base.lo(), t - base.hi());
    const double b = std::min(base.hi(), t - base.lo());
    double acc = 0.0;
    if (b > a) {
        std::vector<double> cuts = base.breakpoints();
        for (double x : base.breakpoints()) cuts.push_back(t - x);
        acc = integrate_panels([&](double v) { return base(v) * dbase(t - v); }, a, b, cuts,
                               tw_->gl_order);
    }
    // distributional part of L' from jumps of L
    for (const auto& [x, j] : tw_->base_jumps) acc += j * base(t - x);
    return acc;
}

KernelMoments moments(const Kernel& k) {
    KernelMoments m;
    if (k.is_polynomial()) {
        m.mu0 = k.poly().moment(0);
        m.mu1 = k.poly().moment(1);
        m.mu2 = k.poly().moment(2);
        m.roughness_R = k.poly().roughness();
        return m;
    }
    auto integral = [&](auto&& f) {
        return integrate_panels(f, k.lo(), k.hi(), k.breakpoints(), 30);
    };
    m.mu0 = integral([&](double u) { return k(u); });
    m.mu1 = integral([&](double u) { return u * k(u); });
    m.mu2 = integral([&](double u) { return u * u * k(u); });
    m.roughness_R = integral([&](double u) { return k(u) * k(u); });
    return m;
}

Kernel one_sided(const Kernel& k, Side side) {
    if (!k.is_symmetric()) throw validation_error("one_sided: kernel must be symmetric");
    if (!k.is_polynomial()) throw validation_error("one_sided: unsupported kernel kind");
    const PiecewisePoly half = side == Side::left ? k.poly().restricted(k.lo(), 0.0)
                                                  : k.poly().restricted(0.0, k.hi());
    const std::string tag = side == Side::left ? "left" : "right";
    return Kernel(Kernel::Kind::one_sided, "one_sided(" + k.name() + "," + tag + ")",
                  half.scaled(2.0));
}

Kernel equivalent_local_linear(const Kernel& k) {
    const KernelMoments m = moments(k);
    const double den = m.mu2 - m.mu1 * m.mu1;
    if (den <= 0.0) throw numeric_error("equivalent_local_linear: singular kernel");
    if (!k.is_polynomial()) {
        if (std::abs(m.mu1) < 1e-12) return k;  // symmetric: equivalent kernel is itself
        throw numeric_error("equivalent_local_linear: unsupported kernel kind");
    }
    const Poly factor({m.mu2 / den, -m.mu1 / den});
    return Kernel(Kernel::Kind::equivalent, "equivalent(" + k.name() + ")",
                  k.poly().multiplied(factor));
}

Kernel twicing(const Kernel& k) {
    if (!k.is_polynomial()) throw validation_error("twicing: unsupported kernel kind");
    auto tw = std::make_shared<Kernel::TwicingData>();
    tw->base = k.poly();
    tw->base_deriv = k.poly().derivative();
    tw->base_jumps = k.poly().jumps();
    const int deg = max_degree(k.poly());
    tw->gl_order = std::max(20, deg + 2);

    const double lo = std::min(k.lo(), 2.0 * k.lo());
    const double hi = std::max(k.hi(), 2.0 * k.hi());
    std::vector<double> breaks;
    for (double x : k.breakpoints())
        for (double y : k.breakpoints()) breaks.push_back(x + y);
    for (double x : k.breakpoints()) breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    return Kernel(Kernel::Kind::twicing, "twicing(" + k.name() + ")", k.poly().scaled(2.0),
                  std::move(tw), lo, hi, std::move(breaks));
}

Kernel reflect(const Kernel& k) {
    if (k.is_polynomial())
        return Kernel(k.kind(), "reflect(" + k.name() + ")", k.poly().reflected());
    Kernel base(Kernel::Kind::custom, "reflect", k.tw_->base.reflected());
    Kernel out = twicing(base);
    out.name_ = "reflect(" + k.name() + ")";
    return out;
}

}  // namespace hazval
