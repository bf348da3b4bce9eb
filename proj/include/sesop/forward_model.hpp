#pragma once

#include <memory>

#include "sesop/grid_function.hpp"

namespace sesop {

/// F and its first-order information frozen at one parameter x.
class Linearization {
 public:
  virtual ~Linearization() = default;

  virtual const GridFunction& parameter() const = 0;
  /// F(x).
  virtual const GridFunction& value() const = 0;
  /// F'(x) h.
  virtual GridFunction derivative(const GridFunction& h) const = 0;
  /// F'(x)* w, adjoint with respect to the h^2-weighted pairings on X and Y.
  virtual GridFunction adjoint(const GridFunction& w) const = 0;
};

/// A (possibly nonlinear) forward operator F : X -> Y on grid functions.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual std::shared_ptr<const Linearization> linearize(const GridFunction& x) const = 0;
};

/// Power-iteration estimate of ||F'(x)|| in the weighted l2 norms, seeded so
/// repeated calls return identical values.
double operator_norm_estimate(const Linearization& lin, int iterations = 60,
                              unsigned long long seed = 0x5e5017ULL);

}  // namespace sesop
