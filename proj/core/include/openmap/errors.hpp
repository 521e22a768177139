#pragma once

#include <stdexcept>
#include <string>

namespace openmap {

/// Raised when inputs violate an operation's preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails (solver non-convergence, degenerate fit).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A region has structure finer than the 1/N position grid can represent.
class UnresolvedRegionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace openmap
