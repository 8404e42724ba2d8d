#pragma once

#include <stdexcept>
#include <string>

namespace hazval {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files (CSV, config).
struct parse_error : error {
    using error::error;
};

// Structurally valid input violating a domain invariant.
struct validation_error : error {
    using error::error;
};

// Numeric failures: degenerate pilots, quadrature breakdown,
// unbounded-bandwidth oracles, undefined scores.
struct numeric_error : error {
    using error::error;
};

// Invalid run configuration (bad probabilities, bad grids, ...).
struct config_error : error {
    using error::error;
};

}  // namespace hazval
