#pragma once

#include <stdexcept>
#include <string>

namespace pdprox {

/// Input of the wrong shape or outside a function's domain.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver configuration that violates an admissibility condition
/// (stepsize inequalities, missing smooth term, non-strongly-convex g
/// passed to the accelerated scheme).  Maps to CLI exit code 2.
class ConfigRejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative routine ran out of its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}

  double residual;
};

/// Malformed manifest, matrix, vector, or graph file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdprox
