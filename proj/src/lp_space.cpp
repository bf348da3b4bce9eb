#include "sesop/lp_space.hpp"

#include <cmath>
#include <string>

namespace sesop {

double conjugate_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw DomainError("conjugate exponent needs p > 1, got " + std::to_string(p));
  }
  return p / (p - 1.0);
}

SpaceSpec::SpaceSpec(double norm_exponent, double gauge_exponent, double h)
    : norm_exponent_(norm_exponent), gauge_exponent_(gauge_exponent), h_(h) {
  if (!(norm_exponent > 1.0) || !std::isfinite(norm_exponent)) {
    throw DomainError("norm exponent must be > 1, got " + std::to_string(norm_exponent));
  }
  if (!(gauge_exponent > 1.0) || !std::isfinite(gauge_exponent)) {
    throw DomainError("gauge exponent must be > 1, got " + std::to_string(gauge_exponent));
  }
  if (!(h > 0.0) || !(h < 1.0)) {
    throw DomainError("grid spacing must lie in (0, 1), got " + std::to_string(h));
  }
}

SpaceSpec SpaceSpec::dual() const {
  return SpaceSpec(conjugate_exponent(norm_exponent_), conjugate_exponent(gauge_exponent_), h_);
}

void SpaceSpec::check_grid(const GridFunction& f) const {
  const double expected = f.spacing();
  if (std::abs(expected - h_) > 1e-12 * h_) {
    throw DimensionError("grid with N=" + std::to_string(f.n_interior()) +
                         " does not match space spacing h=" + std::to_string(h_));
  }
}

namespace {

// sum |f|^r without the weight, scaled by the max entry to avoid overflow
// for large exponents.
double raw_lp_norm(const GridFunction::Array& v, double r) {
  const double amax = v.abs().maxCoeff();
  if (amax == 0.0) return 0.0;
  if (r == 2.0) return amax * std::sqrt((v / amax).square().sum());
  return amax * std::pow((v.abs() / amax).pow(r).sum(), 1.0 / r);
}

// |v|^(e) sign(v), pointwise, with 0 -> 0.
GridFunction::Array signed_power(const GridFunction::Array& v, double e) {
  if (e == 1.0) return v;
  return v.unaryExpr([e](double a) {
    if (a == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(a), e), a);
  });
}

}  // namespace

double weighted_norm(const GridFunction& f, const SpaceSpec& space) {
  space.check_grid(f);
  const double r = space.norm_exponent();
  return std::pow(space.h(), 2.0 / r) * raw_lp_norm(f.values(), r);
}

double dual_pairing(const GridFunction& g, const GridFunction& f, const SpaceSpec& space) {
  g.check_shape(f);
  space.check_grid(f);
  return space.weight() * (g.values() * f.values()).sum();
}

GridFunction duality_map(const GridFunction& f, const SpaceSpec& space) {
  const double r = space.norm_exponent();
  const double q = space.gauge_exponent();
  const double norm = weighted_norm(f, space);
  if (norm == 0.0) return GridFunction(f.n_interior());
  GridFunction::Array g = signed_power(f.values(), r - 1.0);
  if (q != r) g *= std::pow(norm, q - r);
  return GridFunction(std::move(g));
}

GridFunction inverse_duality_map(const GridFunction& g, const SpaceSpec& space) {
  return duality_map(g, space.dual());
}

double bregman_distance(const GridFunction& x, const GridFunction& x_tilde,
                        const SpaceSpec& space) {
  space.check_grid(x);
  space.check_grid(x_tilde);
  if (x == x_tilde) return 0.0;
  const double q = space.gauge_exponent();
  const double q_conj = conjugate_exponent(q);
  const double nx = std::pow(weighted_norm(x, space), q);
  const double nxt = std::pow(weighted_norm(x_tilde, space), q);
  const double d = nxt / q + nx / q_conj - dual_pairing(duality_map(x, space), x_tilde, space);
  const double scale = nxt / q + nx / q_conj;
  if (d < 0.0 && d > -1e-12 * scale) return 0.0;
  return d;
}

}  // namespace sesop
