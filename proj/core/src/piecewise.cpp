#include "hazval/piecewise.hpp"

#include <algorithm>
#include <cmath>

namespace hazval {

PiecewisePoly::PiecewisePoly(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    pieces_.erase(std::remove_if(pieces_.begin(), pieces_.end(),
                                 [](const Piece& p) { return p.hi <= p.lo; }),
                  pieces_.end());
}

double PiecewisePoly::operator()(double u) const {
    for (const Piece& p : pieces_)
        if (u >= p.lo && u <= p.hi) return p.poly(u);
    return 0.0;
}

std::vector<double> PiecewisePoly::breakpoints() const {
    std::vector<double> bs;
    for (const Piece& p : pieces_) {
        bs.push_back(p.lo);
        bs.push_back(p.hi);
    }
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    return bs;
}

PiecewisePoly PiecewisePoly::derivative() const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const Piece& p : pieces_) out.push_back({p.lo, p.hi, p.poly.derivative()});
    return PiecewisePoly(std::move(out));
}

PiecewisePoly PiecewisePoly::reflected() const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const Piece& p : pieces_) out.push_back({-p.hi, -p.lo, p.poly.reflected()});
    return PiecewisePoly(std::move(out));
}

PiecewisePoly PiecewisePoly::multiplied(const Poly& q) const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const Piece& p : pieces_) out.push_back({p.lo, p.hi, p.poly * q});
    return PiecewisePoly(std::move(out));
}

PiecewisePoly PiecewisePoly::restricted(double a, double b) const {
    std::vector<Piece> out;
    for (const Piece& p : pieces_) {
        const double lo = std::max(p.lo, a), hi = std::min(p.hi, b);
        if (hi > lo) out.push_back({lo, hi, p.poly});
    }
    return PiecewisePoly(std::move(out));
}

PiecewisePoly PiecewisePoly::scaled(double s) const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const Piece& p : pieces_) out.push_back({p.lo, p.hi, p.poly * s});
    return PiecewisePoly(std::move(out));
}

double PiecewisePoly::moment(int j) const {
    std::vector<double> mono(static_cast<std::size_t>(j) + 1, 0.0);
    mono.back() = 1.0;
    const Poly uj{mono};
    double acc = 0.0;
    for (const Piece& p : pieces_) acc += (p.poly * uj).integral(p.lo, p.hi);
    return acc;
}

double PiecewisePoly::roughness() const {
    double acc = 0.0;
    for (const Piece& p : pieces_) acc += (p.poly * p.poly).integral(p.lo, p.hi);
    return acc;
}

std::vector<std::pair<double, double>> PiecewisePoly::jumps() const {
    std::vector<std::pair<double, double>> out;
    for (double x : breakpoints()) {
        double left = 0.0, right = 0.0;
        for (const Piece& p : pieces_) {
            if (p.hi == x) left = p.poly(x);
            if (p.lo == x) right = p.poly(x);
        }
        const double j = right - left;
        if (j != 0.0) out.emplace_back(x, j);
    }
    return out;
}

}  // namespace hazval
