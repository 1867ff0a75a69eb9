#pragma once

#include <stdexcept>
#include <string>

namespace mfl {

/// Model outside the supported framework (negative noise, non-convex V, ...).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent experiment/scheme configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-convergence, blow-up or a grid too small to hold the requested mass.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfl
