#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sesop {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (e.g. an exponent <= 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grid shapes or spacings that do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inner minimizer ran out of iterations. Carries the last iterate so the
/// caller can decide whether the approximate multipliers are usable.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_t, double grad_norm)
      : Error(what), last_t_(std::move(last_t)), grad_norm_(grad_norm) {}

  const std::vector<double>& last_t() const { return last_t_; }
  double grad_norm() const { return grad_norm_; }

 private:
  std::vector<double> last_t_;
  double grad_norm_;
};

/// Sparse factorization of L(c) failed (singular or indefinite system).
class LinearSolveError : public Error {
 public:
  using Error::Error;
};

/// No feasible point for a halfspace/stripe configuration.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sesop
