#pragma once

#include <utility>
#include <vector>

#include "hazval/estimators.hpp"
#include "hazval/grid_sample.hpp"
#include "hazval/kernel.hpp"

namespace hazval {

enum class SelectionMethod { CV, OSCV_L, OSCV_R, DO, BO };

struct BandwidthGrid {
    std::vector<double> values;  // strictly increasing, > delta

    static BandwidthGrid linspace(double min, double max, int count);
    void validate(const GridSample& sample) const;
};

struct SelectionResult {
    double bandwidth = 0.0;  // rescaled by rho for the one-sided methods
    SelectionMethod method = SelectionMethod::CV;
    EstimatorKind estimator_kind = EstimatorKind::LL;
    std::vector<std::pair<double, double>> score_trace;  // (b, score); NaN when undefined
    bool minimum_at_grid_edge = false;
    bool multiple_local_minima = false;
    bool side_score_degenerate = false;
};

// Cross-validation score
//   Q(b) = n^{-1} [ sum_r a_b(t_r)^2 Y_r w_r - 2 sum_r a_b^{[r,-1]}(t_r) w_r O_r ],
// where a^{[r,-1]} is the estimator recomputed with one occurrence removed
// from cell r (exposures unchanged). `kind` must be LL or MBC; one-sided
// scores are obtained by passing a one-sided kernel. Throws numeric_error
// when the estimator is degenerate at every cell.
double cv_score(const GridSample& sample, double b, EstimatorKind kind, const Kernel& kernel,
                const WeightScheme& weights);

// Same score built on the best one-sided estimator; the side mask is computed
// from the full sample and held fixed across the leave-one-out terms.
double bo_cv_score(const GridSample& sample, double b, EstimatorKind kind,
                   const Kernel& kernel, const WeightScheme& weights, SideMode mode);

// Exhaustive grid minimizers; ties pick the smallest bandwidth. Throws
// numeric_error when every grid score is undefined.
SelectionResult select_cv(const GridSample& sample, const BandwidthGrid& grid,
                          EstimatorKind kind, const Kernel& kernel,
                          const WeightScheme& weights);

// One-sided CV: the score is run with the data-window kernel of the given
// side and the argmin is rescaled by rho (rho_ll or rho_mbc of `kernel`).
SelectionResult select_oscv(const GridSample& sample, const BandwidthGrid& grid,
                            EstimatorKind kind, const Kernel& kernel,
                            const WeightScheme& weights, Side side);

// Double one-sided validation: rho * mean of the left and right one-sided
// argmins. A side whose minimum sits on the grid edge (or fails entirely)
// sets side_score_degenerate; if one side fails the other's argmin is used
// alone.
SelectionResult select_do(const GridSample& sample, const BandwidthGrid& grid,
                          EstimatorKind kind, const Kernel& kernel,
                          const WeightScheme& weights);

// Best one-sided validation: rho * argmin of bo_cv_score, with the side mask
// recomputed for every candidate bandwidth.
SelectionResult select_bo(const GridSample& sample, const BandwidthGrid& grid,
                          EstimatorKind kind, const Kernel& kernel,
                          const WeightScheme& weights, SideMode mode = SideMode::occurrence);

}  // namespace hazval
