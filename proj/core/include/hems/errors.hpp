#pragma once

#include <stdexcept>

namespace hems {

/// Malformed input data, configs, or contract violations. CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric state became non-finite (diverged training, NaN gradients). CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hems
