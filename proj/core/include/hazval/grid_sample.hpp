#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hazval {

// One observed individual: delayed entry at `entry`, leaves observation at
// `exit`, `event` true when the exit is a failure (false: right censoring).
struct IndividualRecord {
    double entry = 0.0;
    double exit = 0.0;
    bool event = false;
};

// Aggregated occurrence/exposure representation of a filtered sample on a
// uniform grid over the study window [t0, t_end]:
//   delta = (t_end - t0) / (R + 1),  t_r = t0 + (r + 1) delta,  r = 0..R-1,
// with grid cells [t_r - delta/2, t_r + delta/2). occurrences[r] counts the
// events in cell r; exposures[r] is the time under risk accumulated in cell r
// (individual-time units, i.e. it already carries a factor delta).
//
// Integrals against Y(s) ds and dN(s) are realized as the Riemann sums
//   int f(s) Y(s) ds ~ sum_r f(t_r) exposures[r],
//   int f(s) dN(s)   ~ sum_r f(t_r) occurrences[r].
//
// occurrences is real-valued so noiseless surrogates (O_r = alpha(t_r) Y_r)
// fit the same type; data ingestion produces integers.
struct GridSample {
    double t0 = 0.0;
    double t_end = 0.0;
    int R = 0;
    double delta = 0.0;
    std::vector<double> occurrences;
    std::vector<double> exposures;
    int n = 0;  // number of individuals behind the aggregation

    double time(int r) const { return t0 + (r + 1) * delta; }

    // Throws validation_error when an invariant fails.
    void validate() const;
};

// Construct the geometry (delta and empty sequences sized R).
GridSample make_grid(double t0, double t_end, int R, int n);

// Cell-wise aggregation of individual records. Events exactly on a cell
// boundary are assigned to the cell on their left; exposure outside the span
// covered by the cells (half a cell at each window end) is dropped.
GridSample aggregate(const std::vector<IndividualRecord>& records, double t0, double t_end,
                     int R);

// Per-cell weights w_r for the cross-validation and error criteria.
struct WeightScheme {
    enum class Kind { unit_product, exposure_significant, custom };

    Kind kind = Kind::unit_product;
    double threshold = 0.0;           // exposure_significant only
    std::vector<double> values;       // custom only, length R

    static WeightScheme unit_product() { return {}; }
    static WeightScheme exposure_significant(double threshold);
    static WeightScheme custom(std::vector<double> values);

    // Resolved per-cell weights. unit_product gives w_r = delta / Y_r on
    // cells with exposure (so that w * Y == delta == dt), and 0 elsewhere.
    std::vector<double> resolve(const GridSample& sample) const;
};

}  // namespace hazval
