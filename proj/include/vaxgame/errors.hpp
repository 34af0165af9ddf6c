#pragma once

#include <stdexcept>
#include <string>

namespace vaxgame {

// Base of every error raised by the library. CLI maps ParameterError and
// DomainError to exit status 1, everything else to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// State outside the closed interval [0, 1].
class DomainError : public Error {
 public:
  using Error::Error;
};

// An operation's documented precondition does not hold (e.g. non-convex curve
// passed to convex_bounds, r = 0 passed to sweep_eps).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature could not meet its tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: degenerate equilibrium where a simple one is required,
// an empty equilibrium set, an odd jump in a branch count.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace vaxgame
