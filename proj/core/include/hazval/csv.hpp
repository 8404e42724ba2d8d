#pragma once

#include <string>
#include <vector>

#include "hazval/estimators.hpp"
#include "hazval/forecasting.hpp"
#include "hazval/grid_sample.hpp"
#include "hazval/selection.hpp"

namespace hazval {

// Schema `time,occurrences,exposure` with a header row; times must be
// uniformly spaced (1e-9 relative) cell midpoints. Throws parse_error with
// the offending line number, validation_error on invariant violations.
GridSample load_grid_csv(const std::string& path);

// Schema `entry,exit,event`, event in {0,1}.
std::vector<IndividualRecord> load_records_csv(const std::string& path);

// Sparse long format `x,z,count`, 1-indexed. With m = 0 the dimension is
// inferred as max(x + z).
RunOffTriangle load_triangle_csv(const std::string& path, int m = 0);

// Single column `weight`, one row per grid cell.
std::vector<double> load_weights_csv(const std::string& path);

// `time,hazard` plus a `side` column for the best one-sided kinds.
void write_hazard_csv(const std::string& path, const HazardEstimate& estimate);

// `bandwidth,score`.
void write_trace_csv(const std::string& path, const SelectionResult& result);

// `calendar_period,forecast` rows followed by a `total` row.
void write_forecast_csv(const std::string& path, const Forecast& fc);

}  // namespace hazval
