#pragma once

#include <stdexcept>
#include <string>

namespace trigkrylov {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The residual does not drop below the tolerance even for very small steps.
class StagnationError : public Error {
 public:
  using Error::Error;
};

/// Problem or solver preconditions violated (nonsymmetric operator for
/// two-pass Lanczos, bound premises, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace trigkrylov
