#pragma once

#include <stdexcept>
#include <string>

namespace bolax {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid or run parameters (non power-of-two grid, bad ranges, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Bad input data: NaN samples, malformed files, complex potentials.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not available for this potential family.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (branch cut, kernel singularity).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed, resolution insufficient, or a numerical
/// consistency check tripped.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace bolax
