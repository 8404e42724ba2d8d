#include "hazval/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "hazval/errors.hpp"

namespace hazval {

namespace detail {

Kernel window_kernel(const Kernel& kernel, Side side) {
    // Side::left covers the data window [t-b, t], i.e. u = t - s in [0, b],
    // so it is the one-sided kernel living on the positive half-line.
    return one_sided(kernel, side == Side::left ? Side::right : Side::left);
}

LocalLinearEngine::LocalLinearEngine(const GridSample& s, double b_, const Kernel& kernel,
                                     const std::vector<double>* moment_weights)
    : sample(s), b(b_) {
    if (!(b > 0.0)) throw validation_error("bandwidth must be positive");
    const double d = s.delta;
    mlo_ = static_cast<int>(std::ceil(kernel.lo() * b / d - 1e-12));
    mhi_ = static_cast<int>(std::floor(kernel.hi() * b / d + 1e-12));
    kvals_.resize(mhi_ - mlo_ + 1);
    for (int m = mlo_; m <= mhi_; ++m) kvals_[m - mlo_] = kernel(m * d / b) / b;

    moments_.resize(s.R);
    inv_det_.assign(s.R, 0.0);
    defined_.assign(s.R, 0);
    for (int r = 0; r < s.R; ++r) {
        StochasticMoments a;
        for (int m = mlo_; m <= mhi_; ++m) {
            const int q = r - m;
            if (q < 0 || q >= s.R) continue;
            double y = s.exposures[q];
            if (moment_weights) y *= (*moment_weights)[q];
            if (y == 0.0) continue;
            const double u = m * d;
            const double kb = kvals_[m - mlo_];
            a.a0 += kb * y;
            a.a1 += kb * u * y;
            a.a2 += kb * u * u * y;
        }
        moments_[r] = a;
        const double det = a.a0 * a.a2 - a.a1 * a.a1;
        if (a.a0 > 0.0 && det > 1e-14 * a.a0 * a.a2) {
            defined_[r] = 1;
            inv_det_[r] = 1.0 / det;
        }
    }
}

double LocalLinearEngine::kbar(int r, int q) const {
    const int m = r - q;
    if (m < mlo_ || m > mhi_ || !defined_[r]) return 0.0;
    const double u = m * sample.delta;
    const StochasticMoments& a = moments_[r];
    return (a.a2 - a.a1 * u) * inv_det_[r] * kvals_[m - mlo_];
}

double LocalLinearEngine::fit(int r, const std::vector<double>& occurrences) const {
    if (!defined_[r]) return 0.0;
    const double d = sample.delta;
    double s0 = 0.0, s1 = 0.0;
    const int qlo = std::max(0, r - mhi_), qhi = std::min(sample.R - 1, r - mlo_);
    for (int q = qlo; q <= qhi; ++q) {
        const double o = occurrences[q];
        if (o == 0.0) continue;
        const double kb = kvals_[r - q - mlo_];
        s0 += kb * o;
        s1 += kb * (r - q) * d * o;
    }
    const StochasticMoments& a = moments_[r];
    return (a.a2 * s0 - a.a1 * s1) * inv_det_[r];
}

}  // namespace detail

StochasticMoments stochastic_moments(const GridSample& sample, double t, double b,
                                     const Kernel& kernel,
                                     const std::vector<double>* weighted_by) {
    if (!(b > 0.0)) throw validation_error("stochastic_moments: bandwidth must be positive");
    if (t < sample.t0 || t > sample.t_end)
        throw validation_error("stochastic_moments: t outside the study window");
    StochasticMoments a;
    for (int r = 0; r < sample.R; ++r) {
        const double u = t - sample.time(r);
        if (u / b < kernel.lo() || u / b > kernel.hi()) continue;
        double y = sample.exposures[r];
        if (weighted_by) y *= (*weighted_by)[r];
        if (y == 0.0) continue;
        const double kb = kernel(u / b) / b;
        a.a0 += kb * y;
        a.a1 += kb * u * y;
        a.a2 += kb * u * u * y;
    }
    return a;
}

namespace {

HazardEstimate make_estimate(const GridSample& s, EstimatorKind kind, double b,
                             const Kernel& kernel) {
    HazardEstimate e;
    e.t0 = s.t0;
    e.t_end = s.t_end;
    e.delta = s.delta;
    e.R = s.R;
    e.kind = kind;
    e.bandwidth = b;
    e.kernel_name = kernel.name();
    e.raw.assign(s.R, 0.0);
    e.undefined_mask.assign(s.R, 0);
    return e;
}

void publish_clipped(HazardEstimate& e) {
    e.values = e.raw;
    for (double& v : e.values) v = std::max(v, 0.0);
}

// Shared MBC machinery: correction of an arbitrary pilot curve. Returns raw
// values; cells with a degenerate correction kernel are flagged undefined.
struct MbcFit {
    std::vector<double> raw;
    std::vector<char> undefined;
};

MbcFit mbc_correct(const GridSample& s, double b, const Kernel& kernel,
                   const std::vector<double>& pilot) {
    double pmax = 0.0;
    for (double v : pilot) pmax = std::max(pmax, v);
    if (pmax <= 0.0) throw numeric_error("mbc_hazard: degenerate pilot estimate");
    const double floor = 1e-12 * pmax;

    std::vector<double> pilot_sq(s.R, 0.0), occ_pilot(s.R, 0.0);
    for (int r = 0; r < s.R; ++r)
        if (pilot[r] > floor) {
            pilot_sq[r] = pilot[r] * pilot[r];
            occ_pilot[r] = s.occurrences[r] * pilot[r];
        }

    detail::LocalLinearEngine engine(s, b, kernel, &pilot_sq);
    MbcFit fit;
    fit.raw.assign(s.R, 0.0);
    fit.undefined.assign(s.R, 0);
    for (int r = 0; r < s.R; ++r) {
        if (!engine.defined(r)) {
            fit.undefined[r] = 1;
            continue;
        }
        fit.raw[r] = pilot[r] * engine.fit(r, occ_pilot);
    }
    return fit;
}

}  // namespace

HazardEstimate ll_hazard(const GridSample& sample, double b, const Kernel& kernel) {
    detail::LocalLinearEngine engine(sample, b, kernel);
    HazardEstimate e = make_estimate(sample, EstimatorKind::LL, b, kernel);
    for (int r = 0; r < sample.R; ++r) {
        if (!engine.defined(r)) {
            e.undefined_mask[r] = 1;
            continue;
        }
        e.raw[r] = engine.fit(r, sample.occurrences);
    }
    publish_clipped(e);
    return e;
}

HazardEstimate mbc_hazard(const GridSample& sample, double b, const Kernel& kernel) {
    const HazardEstimate pilot = ll_hazard(sample, b, kernel);
    const MbcFit fit = mbc_correct(sample, b, kernel, pilot.raw);
    HazardEstimate e = make_estimate(sample, EstimatorKind::MBC, b, kernel);
    e.raw = fit.raw;
    e.undefined_mask = fit.undefined;
    publish_clipped(e);
    return e;
}

bool side_select(const GridSample& sample, double t, double b, SideMode mode) {
    const std::vector<double>& x =
        mode == SideMode::occurrence ? sample.occurrences : sample.exposures;
    double left = 0.0, right = 0.0;
    for (int r = 0; r < sample.R; ++r) {
        const double tr = sample.time(r);
        if (tr >= t - b && tr < t) left += x[r];
        else if (tr > t && tr <= t + b) right += x[r];
    }
    return left > right;
}

namespace {

std::vector<char> side_mask_for(const GridSample& s, double b, SideMode mode) {
    std::vector<char> mask(s.R, 0);
    for (int r = 0; r < s.R; ++r)
        mask[r] = side_select(s, s.time(r), b, mode) ? 1 : 0;
    return mask;
}

}  // namespace

HazardEstimate bo_ll_hazard(const GridSample& sample, double b, const Kernel& kernel,
                            SideMode mode) {
    const Kernel kl = detail::window_kernel(kernel, Side::left);
    const Kernel kr = detail::window_kernel(kernel, Side::right);
    detail::LocalLinearEngine left(sample, b, kl);
    detail::LocalLinearEngine right(sample, b, kr);
    HazardEstimate e = make_estimate(sample, EstimatorKind::BO_LL, b, kernel);
    e.side_mask = side_mask_for(sample, b, mode);
    for (int r = 0; r < sample.R; ++r) {
        const detail::LocalLinearEngine& eng = e.side_mask[r] ? left : right;
        if (!eng.defined(r)) {
            e.undefined_mask[r] = 1;
            continue;
        }
        e.raw[r] = eng.fit(r, sample.occurrences);
    }
    publish_clipped(e);
    return e;
}

HazardEstimate bo_mbc_hazard(const GridSample& sample, double b, const Kernel& kernel,
                             SideMode mode) {
    HazardEstimate e = make_estimate(sample, EstimatorKind::BO_MBC, b, kernel);
    e.side_mask = side_mask_for(sample, b, mode);
    const bool need_left =
        std::any_of(e.side_mask.begin(), e.side_mask.end(), [](char c) { return c; });
    const bool need_right =
        std::any_of(e.side_mask.begin(), e.side_mask.end(), [](char c) { return !c; });

    auto side_fit = [&](Side side) {
        const Kernel k = detail::window_kernel(kernel, side);
        detail::LocalLinearEngine pilot_engine(sample, b, k);
        std::vector<double> pilot(sample.R, 0.0);
        for (int r = 0; r < sample.R; ++r)
            if (pilot_engine.defined(r)) pilot[r] = pilot_engine.fit(r, sample.occurrences);
        return mbc_correct(sample, b, k, pilot);
    };

    MbcFit left, right;
    if (need_left) left = side_fit(Side::left);
    if (need_right) right = side_fit(Side::right);
    for (int r = 0; r < sample.R; ++r) {
        const MbcFit& fit = e.side_mask[r] ? left : right;
        if (fit.undefined[r]) {
            e.undefined_mask[r] = 1;
            continue;
        }
        e.raw[r] = fit.raw[r];
    }
    publish_clipped(e);
    return e;
}

}  // namespace hazval
