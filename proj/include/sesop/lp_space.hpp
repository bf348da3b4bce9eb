#pragma once

#include "sesop/grid_function.hpp"

namespace sesop {

/// Conjugate exponent p/(p-1). Throws DomainError for p <= 1.
double conjugate_exponent(double p);

/// A discrete weighted Lebesgue space on the unit-square grid.
///
/// `norm_exponent` is the Lebesgue exponent r, `gauge_exponent` the power q of
/// the duality mapping J_q (the gradient of (1/q)||.||^q). Norms carry the
/// quadrature weight h^(2/r); the dual pairing carries h^2. With that split
/// the pointwise duality map needs no weight and J_2 on L^2 is the identity.
class SpaceSpec {
 public:
  SpaceSpec(double norm_exponent, double gauge_exponent, double h);

  /// Space for a grid with N interior nodes.
  static SpaceSpec on_grid(double norm_exponent, double gauge_exponent, int n_interior) {
    return SpaceSpec(norm_exponent, gauge_exponent, 1.0 / (n_interior + 1));
  }

  double norm_exponent() const { return norm_exponent_; }
  double gauge_exponent() const { return gauge_exponent_; }
  double h() const { return h_; }
  double weight() const { return h_ * h_; }

  /// L^{r*} with gauge q*; its duality map inverts ours.
  SpaceSpec dual() const;

  bool is_hilbert() const { return norm_exponent_ == 2.0 && gauge_exponent_ == 2.0; }

  /// Throws DimensionError if `f` does not live on this space's grid.
  void check_grid(const GridFunction& f) const;

 private:
  double norm_exponent_;
  double gauge_exponent_;
  double h_;
};

/// h^(2/r) * (sum over all nodes |f_ij|^r)^(1/r).
double weighted_norm(const GridFunction& f, const SpaceSpec& space);

/// h^2 * sum g_ij f_ij.
double dual_pairing(const GridFunction& g, const GridFunction& f, const SpaceSpec& space);

/// J_q(f) = ||f||^(q-r) |f|^(r-1) sign(f). J_q(0) = 0 for every gauge.
GridFunction duality_map(const GridFunction& f, const SpaceSpec& space);

/// J_{q*} on the dual space; the inverse of duality_map on the same space.
GridFunction inverse_duality_map(const GridFunction& g, const SpaceSpec& space);

/// D_q(x, x_tilde) = (1/q)||x_tilde||^q + (1/q*)||x||^q - <J_q(x), x_tilde>.
/// Rounding-level negative values are clamped to zero.
double bregman_distance(const GridFunction& x, const GridFunction& x_tilde,
                        const SpaceSpec& space);

}  // namespace sesop
