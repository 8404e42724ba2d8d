#include "hazval/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hazval/errors.hpp"
#include "hazval/kernel_constants.hpp"

namespace hazval {

BandwidthGrid BandwidthGrid::linspace(double min, double max, int count) {
    if (count < 2) throw validation_error("BandwidthGrid: need at least 2 values");
    if (!(min > 0.0) || !(max > min))
        throw validation_error("BandwidthGrid: need 0 < min < max");
    BandwidthGrid g;
    g.values.resize(count);
    for (int i = 0; i < count; ++i) g.values[i] = min + i * (max - min) / (count - 1);
    return g;
}

void BandwidthGrid::validate(const GridSample& sample) const {
    if (values.size() < 2) throw validation_error("BandwidthGrid: need at least 2 values");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > sample.delta))
            throw validation_error("BandwidthGrid: bandwidths must exceed the grid spacing");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw validation_error("BandwidthGrid: values must be strictly increasing");
    }
}

namespace {

constexpr double nan_score = std::numeric_limits<double>::quiet_NaN();

EstimatorFamily family_of(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::LL: return EstimatorFamily::LL;
        case EstimatorKind::MBC: return EstimatorFamily::MBC;
        default: throw validation_error("selection: estimator kind must be LL or MBC");
    }
}

// Kernel values on the cell-offset lattice, shared by the per-point MBC
// evaluations below.
struct Lattice {
    int mlo, mhi;
    double delta;
    std::vector<double> kb;  // K_b(m delta), m = mlo..mhi

    Lattice(const Kernel& kernel, double b, double delta_) : delta(delta_) {
        mlo = static_cast<int>(std::ceil(kernel.lo() * b / delta - 1e-12));
        mhi = static_cast<int>(std::floor(kernel.hi() * b / delta + 1e-12));
        kb.resize(mhi - mlo + 1);
        for (int m = mlo; m <= mhi; ++m) kb[m - mlo] = kernel(m * delta / b) / b;
    }
};

// MBC estimate at a single grid point against an explicit pilot curve; the
// occurrence at cell r itself is overridden (leave-one-out). Returns nullopt
// on a degenerate correction kernel.
std::optional<double> mbc_point(const GridSample& s, const Lattice& lat, int r,
                                const std::vector<double>& pilot, double floor,
                                double occ_r) {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, s0 = 0.0, s1 = 0.0;
    for (int m = lat.mlo; m <= lat.mhi; ++m) {
        const int q = r - m;
        if (q < 0 || q >= s.R || pilot[q] <= floor) continue;
        const double k = lat.kb[m - lat.mlo];
        const double u = m * lat.delta;
        const double y = k * s.exposures[q] * pilot[q] * pilot[q];
        a0 += y;
        a1 += u * y;
        a2 += u * u * y;
        const double o = k * (q == r ? occ_r : s.occurrences[q]) * pilot[q];
        s0 += o;
        s1 += u * o;
    }
    const double det = a0 * a2 - a1 * a1;
    if (!(a0 > 0.0 && det > 1e-14 * a0 * a2)) return std::nullopt;
    return pilot[r] * (a2 * s0 - a1 * s1) / det;
}

// One side of the scoring machinery: the full-sample estimate and the
// leave-one-occurrence-out estimate at each grid point.
struct ScoringFit {
    std::vector<double> raw;
    std::vector<double> loo;
    std::vector<char> defined;
};

ScoringFit ll_scoring_fit(const GridSample& s, double b, const Kernel& kernel) {
    detail::LocalLinearEngine engine(s, b, kernel);
    ScoringFit f;
    f.raw.assign(s.R, 0.0);
    f.loo.assign(s.R, 0.0);
    f.defined.assign(s.R, 0);
    for (int r = 0; r < s.R; ++r) {
        if (!engine.defined(r)) continue;
        f.defined[r] = 1;
        f.raw[r] = engine.fit(r, s.occurrences);
        // the estimator is linear in the occurrences
        f.loo[r] = f.raw[r] - engine.kbar(r, r);
    }
    return f;
}

ScoringFit mbc_scoring_fit(const GridSample& s, double b, const Kernel& kernel) {
    detail::LocalLinearEngine pilot_engine(s, b, kernel);
    std::vector<double> pilot(s.R, 0.0);
    for (int r = 0; r < s.R; ++r)
        if (pilot_engine.defined(r)) pilot[r] = pilot_engine.fit(r, s.occurrences);
    const double pmax = *std::max_element(pilot.begin(), pilot.end());
    if (pmax <= 0.0) throw numeric_error("cv_score: degenerate pilot estimate");
    const double floor = 1e-12 * pmax;

    const Lattice lat(kernel, b, s.delta);
    ScoringFit f;
    f.raw.assign(s.R, 0.0);
    f.loo.assign(s.R, 0.0);
    f.defined.assign(s.R, 0);
    std::vector<double> pilot_loo(s.R);
    for (int r = 0; r < s.R; ++r) {
        if (auto v = mbc_point(s, lat, r, pilot, floor, s.occurrences[r])) {
            f.defined[r] = 1;
            f.raw[r] = *v;
        }
        if (s.occurrences[r] <= 0.0) continue;
        // pilot after removing one occurrence from cell r (LL linearity)
        pilot_loo = pilot;
        for (int q = std::max(0, r + lat.mlo); q <= std::min(s.R - 1, r + lat.mhi); ++q)
            pilot_loo[q] = pilot[q] - pilot_engine.kbar(q, r);
        const double pmax_loo = *std::max_element(pilot_loo.begin(), pilot_loo.end());
        if (pmax_loo <= 0.0) continue;  // degenerate leave-out pilot: term drops
        if (auto v = mbc_point(s, lat, r, pilot_loo, 1e-12 * pmax_loo,
                               s.occurrences[r] - 1.0))
            f.loo[r] = *v;
    }
    return f;
}

ScoringFit scoring_fit(const GridSample& s, double b, EstimatorKind kind,
                       const Kernel& kernel) {
    return kind == EstimatorKind::LL ? ll_scoring_fit(s, b, kernel)
                                     : mbc_scoring_fit(s, b, kernel);
}

double assemble_score(const GridSample& s, const ScoringFit& f,
                      const std::vector<double>& w) {
    int defined = 0;
    double first = 0.0, second = 0.0;
    for (int r = 0; r < s.R; ++r) {
        if (!f.defined[r]) continue;
        ++defined;
        first += f.raw[r] * f.raw[r] * s.exposures[r] * w[r];
        second += f.loo[r] * w[r] * s.occurrences[r];
    }
    if (defined == 0) throw numeric_error("cv_score: estimator degenerate at every cell");
    const double n = s.n > 0 ? s.n : 1.0;
    return (first - 2.0 * second) / n;
}

}  // namespace

double cv_score(const GridSample& sample, double b, EstimatorKind kind, const Kernel& kernel,
                const WeightScheme& weights) {
    family_of(kind);
    return assemble_score(sample, scoring_fit(sample, b, kind, kernel),
                          weights.resolve(sample));
}

double bo_cv_score(const GridSample& sample, double b, EstimatorKind kind,
                   const Kernel& kernel, const WeightScheme& weights, SideMode mode) {
    family_of(kind);
    const ScoringFit left =
        scoring_fit(sample, b, kind, detail::window_kernel(kernel, Side::left));
    const ScoringFit right =
        scoring_fit(sample, b, kind, detail::window_kernel(kernel, Side::right));
    ScoringFit f;
    f.raw.assign(sample.R, 0.0);
    f.loo.assign(sample.R, 0.0);
    f.defined.assign(sample.R, 0);
    for (int r = 0; r < sample.R; ++r) {
        const ScoringFit& side =
            side_select(sample, sample.time(r), b, mode) ? left : right;
        f.raw[r] = side.raw[r];
        f.loo[r] = side.loo[r];
        f.defined[r] = side.defined[r];
    }
    return assemble_score(sample, f, weights.resolve(sample));
}

namespace {

struct Trace {
    std::vector<std::pair<double, double>> entries;
    int argmin = -1;
    bool edge = false;
    bool multi = false;
};

template <typename ScoreFn>
Trace run_trace(const BandwidthGrid& grid, ScoreFn&& score) {
    Trace t;
    t.entries.reserve(grid.values.size());
    for (double b : grid.values) {
        double s;
        try {
            s = score(b);
        } catch (const numeric_error&) {
            s = nan_score;
        }
        t.entries.emplace_back(b, s);
    }
    const int n = static_cast<int>(t.entries.size());
    for (int i = 0; i < n; ++i) {
        const double s = t.entries[i].second;
        if (std::isnan(s)) continue;
        if (t.argmin < 0 || s < t.entries[t.argmin].second) t.argmin = i;
    }
    if (t.argmin < 0) return t;
    t.edge = t.argmin == 0 || t.argmin == n - 1;
    auto at = [&](int i) {
        if (i < 0 || i >= n) return std::numeric_limits<double>::infinity();
        const double s = t.entries[i].second;
        return std::isnan(s) ? std::numeric_limits<double>::infinity() : s;
    };
    int minima = 0;
    for (int i = 0; i < n; ++i)
        if (!std::isnan(t.entries[i].second) && at(i) < at(i - 1) && at(i) < at(i + 1))
            ++minima;
    t.multi = minima > 1;
    return t;
}

SelectionResult from_trace(const Trace& t, SelectionMethod method, EstimatorKind kind,
                           double rho) {
    if (t.argmin < 0) throw numeric_error("selection: score undefined on the entire grid");
    SelectionResult res;
    res.bandwidth = rho * t.entries[t.argmin].first;
    res.method = method;
    res.estimator_kind = kind;
    res.score_trace = t.entries;
    res.minimum_at_grid_edge = t.edge;
    res.multiple_local_minima = t.multi;
    return res;
}

}  // namespace

SelectionResult select_cv(const GridSample& sample, const BandwidthGrid& grid,
                          EstimatorKind kind, const Kernel& kernel,
                          const WeightScheme& weights) {
    family_of(kind);
    grid.validate(sample);
    const std::vector<double> w = weights.resolve(sample);
    Trace t = run_trace(grid, [&](double b) {
        return assemble_score(sample, scoring_fit(sample, b, kind, kernel), w);
    });
    return from_trace(t, SelectionMethod::CV, kind, 1.0);
}

SelectionResult select_oscv(const GridSample& sample, const BandwidthGrid& grid,
                            EstimatorKind kind, const Kernel& kernel,
                            const WeightScheme& weights, Side side) {
    grid.validate(sample);
    const double rho = rho_factor(family_of(kind), kernel);
    const Kernel wk = detail::window_kernel(kernel, side);
    const std::vector<double> w = weights.resolve(sample);
    Trace t = run_trace(grid, [&](double b) {
        return assemble_score(sample, scoring_fit(sample, b, kind, wk), w);
    });
    return from_trace(t, side == Side::left ? SelectionMethod::OSCV_L : SelectionMethod::OSCV_R,
                      kind, rho);
}

SelectionResult select_do(const GridSample& sample, const BandwidthGrid& grid,
                          EstimatorKind kind, const Kernel& kernel,
                          const WeightScheme& weights) {
    grid.validate(sample);
    const double rho = rho_factor(family_of(kind), kernel);
    const std::vector<double> w = weights.resolve(sample);
    auto side_trace = [&](Side side) {
        const Kernel wk = detail::window_kernel(kernel, side);
        return run_trace(grid, [&](double b) {
            return assemble_score(sample, scoring_fit(sample, b, kind, wk), w);
        });
    };
    const Trace left = side_trace(Side::left);
    const Trace right = side_trace(Side::right);
    if (left.argmin < 0 && right.argmin < 0)
        throw numeric_error("select_do: both one-sided scores undefined on the grid");

    SelectionResult res;
    res.method = SelectionMethod::DO;
    res.estimator_kind = kind;
    res.side_score_degenerate =
        left.argmin < 0 || right.argmin < 0 || left.edge || right.edge;
    res.minimum_at_grid_edge = left.edge || right.edge;
    res.multiple_local_minima = left.multi || right.multi;
    if (left.argmin < 0)
        res.bandwidth = rho * right.entries[right.argmin].first;
    else if (right.argmin < 0)
        res.bandwidth = rho * left.entries[left.argmin].first;
    else
        res.bandwidth = 0.5 * rho * (left.entries[left.argmin].first +
                                     right.entries[right.argmin].first);
    res.score_trace.reserve(grid.values.size());
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const double l = left.entries[i].second, r = right.entries[i].second;
        res.score_trace.emplace_back(grid.values[i], 0.5 * (l + r));
    }
    return res;
}

SelectionResult select_bo(const GridSample& sample, const BandwidthGrid& grid,
                          EstimatorKind kind, const Kernel& kernel,
                          const WeightScheme& weights, SideMode mode) {
    grid.validate(sample);
    const double rho = rho_factor(family_of(kind), kernel);
    Trace t = run_trace(
        grid, [&](double b) { return bo_cv_score(sample, b, kind, kernel, weights, mode); });
    return from_trace(t, SelectionMethod::BO, kind, rho);
}

}  // namespace hazval
