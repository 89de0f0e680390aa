#pragma once

#include <stdexcept>
#include <string>

namespace tclab {

// Grid/driver size disagreement between paths that must share a grid.
struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Structural precondition broken (non-monotone clock, unsorted levels, ...).
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Model/feature combination with no implemented formula.
struct unsupported_model : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A read past the information extent of a filtration view.
struct access_violation : std::logic_error {
    using std::logic_error::logic_error;
};

// Requested calendar time not reachable on the simulated horizon; carries the
// horizon that would have been needed.
struct horizon_error : std::runtime_error {
    horizon_error(const std::string& what, double required)
        : std::runtime_error(what), required_horizon(required) {}
    double required_horizon;
};

// Quadrature tail bound above tolerance; the result would be untrustworthy.
struct truncation_error : std::runtime_error {
    truncation_error(const std::string& what, double estimate)
        : std::runtime_error(what), estimate(estimate) {}
    double estimate;
};

// Invalid or incomplete experiment configuration (maps to exit status 1).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tclab
