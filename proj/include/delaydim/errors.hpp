#pragma once

#include <stdexcept>
#include <string>

namespace delaydim {

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Blow-up, non-convergent root, defective spectrum (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two results that must agree do not, e.g. a feasible condition with a
/// nonnegative denominator (CLI exit code 4).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace delaydim
