#pragma once

#include <stdexcept>
#include <string>

namespace elastomon {

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization, eigensolve or iterative solve fails.
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace elastomon
