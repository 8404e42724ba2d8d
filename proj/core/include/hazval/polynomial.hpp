#pragma once

#include <cstddef>
#include <vector>

namespace hazval {

// Dense univariate polynomial, coefficients in ascending order:
// p(u) = c[0] + c[1] u + ... + c[n] u^n.
class Poly {
  public:
    Poly() = default;
    explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly constant(double v) { return Poly({v}); }

    double operator()(double u) const {
        double acc = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * u + c_[i];
        return acc;
    }

    std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
    const std::vector<double>& coeffs() const { return c_; }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Poly(std::move(d));
    }

    // Antiderivative with zero constant term.
    Poly antiderivative() const {
        std::vector<double> a(c_.size() + 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<double>(i + 1);
        return Poly(std::move(a));
    }

    double integral(double lo, double hi) const {
        const Poly a = antiderivative();
        return a(hi) - a(lo);
    }

    Poly operator*(const Poly& o) const {
        if (c_.empty() || o.c_.empty()) return Poly();
        std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Poly(std::move(r));
    }

    Poly operator*(double s) const {
        std::vector<double> r = c_;
        for (double& v : r) v *= s;
        return Poly(std::move(r));
    }

    Poly operator+(const Poly& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return Poly(std::move(r));
    }

    // p(-u)
    Poly reflected() const {
        std::vector<double> r = c_;
        for (std::size_t i = 1; i < r.size(); i += 2) r[i] = -r[i];
        return Poly(std::move(r));
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }

    std::vector<double> c_;
};

}  // namespace hazval
