#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hazval/grid_sample.hpp"
#include "hazval/kernel.hpp"

namespace hazval {

enum class EstimatorKind { LL, MBC, BO_LL, BO_MBC };

// Which process drives the side-selection function xi_b(t) of the best
// one-sided estimators.
enum class SideMode { occurrence, exposure };

// A fitted hazard curve on the sample grid. `values` is the published,
// non-negative curve; `raw` keeps the unclipped estimator values (local
// linear fits can dip below zero near boundaries), which is what the
// cross-validation score is defined on.
struct HazardEstimate {
    double t0 = 0.0, t_end = 0.0, delta = 0.0;
    int R = 0;
    std::vector<double> values;
    std::vector<double> raw;
    EstimatorKind kind = EstimatorKind::LL;
    double bandwidth = 0.0;
    std::string kernel_name;
    std::vector<char> undefined_mask;       // cells with no informative exposure
    std::vector<char> side_mask;            // xi_b(t_r); BO kinds only

    double time(int r) const { return t0 + (r + 1) * delta; }
};

struct StochasticMoments {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
};

// a_j(t) = sum_r K_b(t - t_r) (t - t_r)^j Y_r  (MBC variant multiplies each
// summand by weighted_by[r], the squared pilot hazard).
StochasticMoments stochastic_moments(const GridSample& sample, double t, double b,
                                     const Kernel& kernel,
                                     const std::vector<double>* weighted_by = nullptr);

// Local linear hazard estimator. Cells whose moment determinant vanishes (no
// informative exposure in the kernel window) are flagged undefined and set
// to 0.
HazardEstimate ll_hazard(const GridSample& sample, double b, const Kernel& kernel);

// Multiplicatively bias corrected estimator: local linear pilot with the same
// b and kernel, ratio weights pilot(t)/pilot(s), and pilot^2-weighted
// moments. Pilot values below 1e-12 * max(pilot) are excluded from the
// correction sums. Throws numeric_error when the pilot is degenerate
// everywhere.
HazardEstimate mbc_hazard(const GridSample& sample, double b, const Kernel& kernel);

// Side selection process xi_b(t): true (left) iff the window [t-b, t] holds
// strictly more occurrence (or exposure) mass than [t, t+b]; ties select the
// right side. Windows are truncated at the study window.
bool side_select(const GridSample& sample, double t, double b, SideMode mode);

// Best one-sided estimators: at each grid point the left one-sided local
// linear kernel is used when xi_b(t_r) = 1, the right one otherwise. The
// MBC variant uses the matching-side one-sided pilot in its ratio weights.
HazardEstimate bo_ll_hazard(const GridSample& sample, double b, const Kernel& kernel,
                            SideMode mode);
HazardEstimate bo_mbc_hazard(const GridSample& sample, double b, const Kernel& kernel,
                             SideMode mode);

namespace detail {

// Data-window variant of the one-sided kernels used internally by the
// estimators: these are expressed in the argument u = t - s, so the kernel
// covering the data window [t-b, t] (Side::left) has support on u > 0.
Kernel window_kernel(const Kernel& kernel, Side side);

// Local linear fit values against an arbitrary occurrence sequence, shared
// by the estimators and the leave-one-out cross-validation updates.
struct LocalLinearEngine {
    // Precomputes K((r - q) delta / b) and per-cell kernel weights.
    LocalLinearEngine(const GridSample& sample, double b, const Kernel& kernel,
                      const std::vector<double>* moment_weights = nullptr);

    // Kbar_{t_r, b}(t_r - t_q); zero outside the window or on undefined cells.
    double kbar(int r, int q) const;
    double fit(int r, const std::vector<double>& occurrences) const;
    bool defined(int r) const { return static_cast<bool>(defined_[r]); }
    const StochasticMoments& moments(int r) const { return moments_[r]; }

    const GridSample& sample;
    double b;

  private:
    int mlo_, mhi_;                  // cell-offset range r - q with K != 0
    std::vector<double> kvals_;      // K_b(m delta), m = mlo..mhi
    std::vector<StochasticMoments> moments_;
    std::vector<double> inv_det_;
    std::vector<char> defined_;
};

}  // namespace detail

}  // namespace hazval
