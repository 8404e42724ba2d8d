#include "hazval/grid_sample.hpp"

#include <algorithm>
#include <cmath>

#include "hazval/errors.hpp"

namespace hazval {

void GridSample::validate() const {
    if (R < 2) throw validation_error("GridSample: R must be >= 2");
    if (!(t_end > t0)) throw validation_error("GridSample: empty study window");
    if (static_cast<int>(occurrences.size()) != R ||
        static_cast<int>(exposures.size()) != R)
        throw validation_error("GridSample: sequence lengths must equal R");
    if (std::abs(delta - (t_end - t0) / (R + 1)) > 1e-9 * (t_end - t0))
        throw validation_error("GridSample: delta inconsistent with window and R");
    double total_occ = 0.0;
    for (int r = 0; r < R; ++r) {
        if (occurrences[r] < 0.0 || exposures[r] < 0.0)
            throw validation_error("GridSample: negative entry at cell " + std::to_string(r));
        if (occurrences[r] > 0.0 && exposures[r] == 0.0)
            throw validation_error("GridSample: occurrences without exposure at cell " +
                                   std::to_string(r));
        total_occ += occurrences[r];
    }
    if (n > 0 && total_occ > n + 1e-9)
        throw validation_error("GridSample: more occurrences than individuals");
}

GridSample make_grid(double t0, double t_end, int R, int n) {
    if (R < 2) throw validation_error("make_grid: R must be >= 2");
    if (!(t_end > t0)) throw validation_error("make_grid: empty study window");
    GridSample s;
    s.t0 = t0;
    s.t_end = t_end;
    s.R = R;
    s.delta = (t_end - t0) / (R + 1);
    s.occurrences.assign(R, 0.0);
    s.exposures.assign(R, 0.0);
    s.n = n;
    return s;
}

GridSample aggregate(const std::vector<IndividualRecord>& records, double t0, double t_end,
                     int R) {
    GridSample s = make_grid(t0, t_end, R, static_cast<int>(records.size()));
    const double d = s.delta;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const IndividualRecord& rec = records[i];
        if (!(rec.entry < rec.exit) || rec.entry < t0 || rec.exit > t_end + 1e-12)
            throw validation_error("aggregate: record " + std::to_string(i) +
                                   " outside the study window");
        // exposure: overlap of [entry, exit) with each cell [t_r - d/2, t_r + d/2)
        for (int r = 0; r < s.R; ++r) {
            const double lo = s.time(r) - 0.5 * d, hi = s.time(r) + 0.5 * d;
            const double overlap = std::min(rec.exit, hi) - std::max(rec.entry, lo);
            if (overlap > 0.0) s.exposures[r] += overlap;
        }
        if (rec.event) {
            // cell index of the event; boundary values belong to the left cell
            double pos = (rec.exit - t0) / d - 0.5;
            int r = static_cast<int>(std::floor(pos));
            if (pos == std::floor(pos)) --r;
            r = std::clamp(r, 0, s.R - 1);
            s.occurrences[r] += 1.0;
        }
    }
    return s;
}

WeightScheme WeightScheme::exposure_significant(double threshold) {
    WeightScheme w;
    w.kind = Kind::exposure_significant;
    w.threshold = threshold;
    return w;
}

WeightScheme WeightScheme::custom(std::vector<double> values) {
    WeightScheme w;
    w.kind = Kind::custom;
    w.values = std::move(values);
    return w;
}

std::vector<double> WeightScheme::resolve(const GridSample& sample) const {
    std::vector<double> w(sample.R, 0.0);
    switch (kind) {
        case Kind::unit_product:
            for (int r = 0; r < sample.R; ++r)
                if (sample.exposures[r] > 0.0) w[r] = sample.delta / sample.exposures[r];
            break;
        case Kind::exposure_significant:
            for (int r = 0; r < sample.R; ++r)
                if (sample.exposures[r] > threshold) w[r] = 1.0;
            break;
        case Kind::custom:
            if (static_cast<int>(values.size()) != sample.R)
                throw validation_error("WeightScheme: custom weights must have length R");
            for (double v : values)
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw validation_error("WeightScheme: weights must be finite and >= 0");
            w = values;
            break;
    }
    return w;
}

}  // namespace hazval
