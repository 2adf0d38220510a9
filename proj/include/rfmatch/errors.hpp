#pragma once

#include <stdexcept>
#include <string>

namespace rfmatch {

// Bad option values, malformed plans, unknown model ids.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed data handed to an operation (empty series, dimension mismatch).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parameter value outside the model's valid set.
struct ParameterError : std::domain_error {
  using std::domain_error::domain_error;
};

// Numerical failure during estimation (singular covariance, too many
// bootstrap failures).
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optimizer could not produce a finite objective value anywhere.
struct OptimizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rank-deficient Jacobian; the parameter map is not locally invertible.
struct IdentifiabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rfmatch
