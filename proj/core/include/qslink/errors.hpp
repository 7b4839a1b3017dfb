#pragma once

#include <stdexcept>
#include <string>

namespace qslink {

// Error taxonomy maps onto the CLI exit codes:
//   config_error / model_error -> 1 (bad scenario or usage)
//   numeric_error              -> 2 (quadrature or evaluation failure)
// Validation failures are reported, not thrown (exit 3 at the CLI).

// Invalid or inconsistent configuration (violated invariant, bad key, bad units).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario outside the validity region of the closed-form model
// (e.g. sqrt(A_ar)/w_z > 0.5, or a probability that comes out >= 1).
struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure: non-convergent quadrature, overflow, invalid argument.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qslink
