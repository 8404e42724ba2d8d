#pragma once

#include <vector>

#include "hazval/polynomial.hpp"

namespace hazval {

// Compactly supported piecewise polynomial. Pieces are disjoint (up to shared
// endpoints) and sorted. Evaluation at a shared endpoint uses the first piece
// that contains it (intervals treated as closed), which only matters for
// functions with jumps, e.g. one-sided kernels at 0.
class PiecewisePoly {
  public:
    struct Piece {
        double lo, hi;
        Poly poly;
    };

    PiecewisePoly() = default;
    explicit PiecewisePoly(std::vector<Piece> pieces);

    double operator()(double u) const;
    double lo() const { return pieces_.empty() ? 0.0 : pieces_.front().lo; }
    double hi() const { return pieces_.empty() ? 0.0 : pieces_.back().hi; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    // All piece endpoints, ascending, deduplicated.
    std::vector<double> breakpoints() const;

    // Derivative within piece interiors (jump locations keep the piecewise form).
    PiecewisePoly derivative() const;

    // f(-u)
    PiecewisePoly reflected() const;

    // q(u) * f(u) piecewise
    PiecewisePoly multiplied(const Poly& q) const;

    // Restriction to [a, b] (pieces clipped; empty result allowed).
    PiecewisePoly restricted(double a, double b) const;

    PiecewisePoly scaled(double s) const;  // s * f(u)

    // exact integral of u^j f(u) over the support
    double moment(int j) const;
    // exact integral of f(u)^2
    double roughness() const;

    // Jump f(x+) - f(x-) at each breakpoint (zero outside the support).
    std::vector<std::pair<double, double>> jumps() const;

  private:
    std::vector<Piece> pieces_;
};

}  // namespace hazval
