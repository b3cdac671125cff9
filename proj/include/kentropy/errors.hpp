#pragma once

#include <stdexcept>
#include <string>

namespace kentropy {

// Error taxonomy shared by the library and the CLI.  The CLI maps these to
// exit codes: configuration problems -> 2, resource/numeric/regime
// failures -> 3, failed validation checks -> 1.

// Malformed or inconsistent user input (bad JSON, ascending spectrum, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point falls outside the domain box or the tabulated node set.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An argument violates a documented precondition (theta out of range, ...).
struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested computation would exceed hard size caps (grid nodes,
// enumeration boxes, ...).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric invariant failed mid-computation (non-finite value, trace
// bound violation, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The closed-form bound is not valid for the requested parameters; the
// caller must not use a silently wrong number.
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A self-check that is expected to hold numerically did not.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kentropy
