#pragma once

#include <stdexcept>
#include <string>

namespace tgs {

/// Shape disagreement between operands (matmul inner dims, row-pair sizes, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf detected at a checked boundary, or a bad numeric argument.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tgs
