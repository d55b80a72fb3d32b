#pragma once

#include <stdexcept>
#include <string>

namespace relev {

/// Argument outside the mathematical domain of an operation (negative time,
/// uniform outside (0,1), unordered arrival times, malformed history).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical procedure failed: no quantile bracket, quadrature did not
/// converge, an integrand became singular.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hazard requested where the survival function has underflowed to zero.
class OutOfSupportError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A sequence, path set or curve was asked for more entries than it holds.
class TruncationError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed user configuration (mini-grammar, JSON sequence, CLI flags).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace relev
