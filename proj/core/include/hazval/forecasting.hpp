#pragma once

#include <map>
#include <utility>
#include <vector>

#include "hazval/estimators.hpp"
#include "hazval/grid_sample.hpp"

namespace hazval {

// Claim counts N(x, z) by underwriting period x and reporting delay z (both
// 1-indexed); a cell is observed iff x + z <= m. Counts are kept real-valued
// so noiseless multiplicative triangles can be represented exactly.
struct RunOffTriangle {
    int m = 0;
    std::map<std::pair<int, int>, double> counts;

    double at(int x, int z) const {
        auto it = counts.find({x, z});
        return it == counts.end() ? 0.0 : it->second;
    }
    void set(int x, int z, double count);
    double total() const;
    void validate() const;
};

// Reversed-time marginals of the triangle. Component 1 reverses underwriting
// time (u = m + 1 - x) and component 2 reporting delay (u = m + 1 - z); the
// observation constraint x + z <= m becomes left truncation on the reversed
// scale, with entry at z + 1 (resp. x + 1). Both samples live on the grid
// t0 = 0, t_end = m + 1, R = m (delta = 1), cells u = 1..m:
//   O1(u) = sum_{z < u} N(m + 1 - u, z),
//   Y1(u) = sum_{x, z} N(x, z) I(z < u <= m + 1 - x),
// and symmetrically for component 2.
std::pair<GridSample, GridSample> reverse_components(const RunOffTriangle& triangle);

// Backward-hazard estimates for the two components with their product-limit
// survivals and densities on the reversed grids.
struct ComponentEstimates {
    HazardEstimate alpha1_hat, alpha2_hat;
    std::vector<double> S1_hat, S2_hat;  // start at 1, nonincreasing
    std::vector<double> f1_hat, f2_hat;  // >= 0
};

// Discrete product-limit conversion: S(t_r) = prod_{q < r} (1 - a(t_q) delta)
// with factors clipped to [0, 1]; f = a * S (clipped hazard values).
std::pair<std::vector<double>, std::vector<double>> survival_and_density(
    const HazardEstimate& hazard);

ComponentEstimates make_component_estimates(const HazardEstimate& alpha1_hat,
                                            const HazardEstimate& alpha2_hat);

// w1(t) = S1(t)^2 (1 - S2(t))^2 / Y1(t) on cells with exposure, 0 elsewhere;
// component 2 mirrors the form with the roles swapped.
WeightScheme component_weights(int component, const ComponentEstimates& estimates,
                               const GridSample& sample);

struct Forecast {
    std::map<std::pair<int, int>, double> cell_forecasts;  // x + z > m only
    std::vector<double> by_calendar_period;                // periods m+1, m+2, ...
    int first_period = 0;
    double grand_total = 0.0;
};

// Multiplicative forecast: cell (x, z) mass proportional to
// f1(m + 1 - x) * f2(m + 1 - z), scaled so the model mass of the observed
// region equals the observed total count. Delay support is capped at the
// largest observable delay m - 1 (fully-run-off triangle).
Forecast forecast(const RunOffTriangle& triangle, const ComponentEstimates& estimates);

// Classical Chain Ladder baseline: column development factors from cumulated
// rows, lower triangle filled multiplicatively.
Forecast chain_ladder(const RunOffTriangle& triangle);

}  // namespace hazval
