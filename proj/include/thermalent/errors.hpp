#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thermalent {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or out-of-range sizes; the caller asked for something invalid.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (bracket, convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class BracketError : public NumericalError {
 public:
  BracketError(const std::string& what, double lo, double hi, double f_lo, double f_hi)
      : NumericalError(what), lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}

  double lo, hi, f_lo, f_hi;
};

/// Iteration budget exhausted. `previous` and `last` are the final two
/// estimates (quadrature, root finding); `residual` is the final residual
/// of a fixed-point iteration and `state` its last iterate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double previous, double last, double residual,
                   std::vector<double> state = {})
      : NumericalError(what),
        previous(previous),
        last(last),
        residual(residual),
        state(std::move(state)) {}

  double previous;
  double last;
  double residual;
  std::vector<double> state;
};

/// A physical state or identity check failed beyond tolerance.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermalent
