#include "hazval/forecasting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hazval/errors.hpp"

namespace hazval {

void RunOffTriangle::set(int x, int z, double count) {
    if (x < 1 || z < 1 || x + z > m)
        throw validation_error("RunOffTriangle: cell (" + std::to_string(x) + "," +
                               std::to_string(z) + ") outside the upper triangle");
    if (count < 0.0) throw validation_error("RunOffTriangle: negative count");
    counts[{x, z}] = count;
}

double RunOffTriangle::total() const {
    double t = 0.0;
    for (const auto& [xz, c] : counts) t += c;
    return t;
}

void RunOffTriangle::validate() const {
    if (m < 2) throw validation_error("RunOffTriangle: dimension must be >= 2");
    for (const auto& [xz, c] : counts) {
        if (xz.first < 1 || xz.second < 1 || xz.first + xz.second > m)
            throw validation_error("RunOffTriangle: cell outside the upper triangle");
        if (c < 0.0) throw validation_error("RunOffTriangle: negative count");
    }
}

std::pair<GridSample, GridSample> reverse_components(const RunOffTriangle& triangle) {
    triangle.validate();
    if (triangle.counts.empty())
        throw validation_error("reverse_components: empty triangle");
    const int m = triangle.m;
    const int n = static_cast<int>(std::llround(triangle.total()));
    GridSample s1 = make_grid(0.0, m + 1.0, m, n);
    GridSample s2 = make_grid(0.0, m + 1.0, m, n);
    for (const auto& [xz, c] : triangle.counts) {
        const auto [x, z] = xz;
        // component 1: reversed event time m+1-x, entry z+1
        s1.occurrences[(m + 1 - x) - 1] += c;
        for (int u = z + 1; u <= m + 1 - x; ++u) s1.exposures[u - 1] += c;
        // component 2: reversed event time m+1-z, entry x+1
        s2.occurrences[(m + 1 - z) - 1] += c;
        for (int u = x + 1; u <= m + 1 - z; ++u) s2.exposures[u - 1] += c;
    }
    return {std::move(s1), std::move(s2)};
}

std::pair<std::vector<double>, std::vector<double>> survival_and_density(
    const HazardEstimate& hazard) {
    std::vector<double> survival(hazard.R), density(hazard.R);
    double s = 1.0;
    for (int r = 0; r < hazard.R; ++r) {
        survival[r] = s;
        density[r] = hazard.values[r] * s;
        s *= std::clamp(1.0 - hazard.values[r] * hazard.delta, 0.0, 1.0);
    }
    return {std::move(survival), std::move(density)};
}

ComponentEstimates make_component_estimates(const HazardEstimate& alpha1_hat,
                                            const HazardEstimate& alpha2_hat) {
    ComponentEstimates e;
    e.alpha1_hat = alpha1_hat;
    e.alpha2_hat = alpha2_hat;
    std::tie(e.S1_hat, e.f1_hat) = survival_and_density(alpha1_hat);
    std::tie(e.S2_hat, e.f2_hat) = survival_and_density(alpha2_hat);
    return e;
}

WeightScheme component_weights(int component, const ComponentEstimates& estimates,
                               const GridSample& sample) {
    if (component != 1 && component != 2)
        throw validation_error("component_weights: component must be 1 or 2");
    const std::vector<double>& s_own =
        component == 1 ? estimates.S1_hat : estimates.S2_hat;
    const std::vector<double>& s_other =
        component == 1 ? estimates.S2_hat : estimates.S1_hat;
    if (static_cast<int>(s_own.size()) != sample.R ||
        static_cast<int>(s_other.size()) != sample.R)
        throw validation_error("component_weights: estimates/sample grid mismatch");
    std::vector<double> w(sample.R, 0.0);
    for (int r = 0; r < sample.R; ++r) {
        if (sample.exposures[r] <= 0.0) continue;
        const double a = s_own[r], b = 1.0 - s_other[r];
        w[r] = a * a * b * b / sample.exposures[r];
    }
    return WeightScheme::custom(std::move(w));
}

Forecast forecast(const RunOffTriangle& triangle, const ComponentEstimates& estimates) {
    triangle.validate();
    const int m = triangle.m;
    if (estimates.alpha1_hat.R != m || estimates.alpha2_hat.R != m)
        throw validation_error("forecast: estimates not on the reversed triangle grid");
    // cell (x, z) carries reversed coordinates u1 = m+1-x, u2 = m+1-z
    auto mass = [&](int x, int z) {
        return estimates.f1_hat[m - x] * estimates.f2_hat[m - z];
    };
    double observed = 0.0;
    for (int x = 1; x <= m - 1; ++x)
        for (int z = 1; z <= m - x; ++z) observed += mass(x, z);
    if (!(observed > 0.0))
        throw numeric_error("forecast: model mass of the observed region is zero");
    const double scale = triangle.total() / observed;

    Forecast out;
    out.first_period = m + 1;
    out.by_calendar_period.assign(std::max(0, 2 * (m - 1) - m), 0.0);
    double grand = 0.0;
    for (int x = 2; x <= m - 1; ++x)
        for (int z = m - x + 1; z <= m - 1; ++z) {
            const double v = scale * mass(x, z);
            out.cell_forecasts[{x, z}] = v;
            out.by_calendar_period[x + z - m - 1] += v;
            grand += v;
        }
    out.grand_total = grand;
    return out;
}

Forecast chain_ladder(const RunOffTriangle& triangle) {
    triangle.validate();
    const int m = triangle.m;
    // cumulative claims C(x, j) = sum_{z <= j} N(x, z), columns j = 1..m-1
    std::vector<std::vector<double>> cum(m, std::vector<double>(m, 0.0));
    for (int x = 1; x <= m - 1; ++x) {
        double acc = 0.0;
        for (int j = 1; j <= m - 1; ++j) {
            acc += triangle.at(x, j);
            cum[x][j] = acc;
        }
    }
    // development factor into column j from the rows observing both columns
    std::vector<double> factor(m, 1.0);
    for (int j = 2; j <= m - 1; ++j) {
        double num = 0.0, den = 0.0;
        for (int x = 1; x + j <= m; ++x) {
            num += cum[x][j];
            den += cum[x][j - 1];
        }
        factor[j] = den > 0.0 ? num / den : 1.0;
    }

    Forecast out;
    out.first_period = m + 1;
    out.by_calendar_period.assign(std::max(0, 2 * (m - 1) - m), 0.0);
    double grand = 0.0;
    for (int x = 2; x <= m - 1; ++x) {
        double level = cum[x][m - x];  // latest observed cumulative
        for (int z = m - x + 1; z <= m - 1; ++z) {
            const double next = level * factor[z];
            const double v = next - level;
            level = next;
            out.cell_forecasts[{x, z}] = v;
            out.by_calendar_period[x + z - m - 1] += v;
            grand += v;
        }
    }
    out.grand_total = grand;
    return out;
}

}  // namespace hazval
