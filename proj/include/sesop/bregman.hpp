#pragma once

#include <optional>
#include <vector>

#include "sesop/grid_function.hpp"
#include "sesop/lp_space.hpp"

namespace sesop {

/// The set { x : |<u_star, x> - alpha| <= xi }.
struct Stripe {
  GridFunction u_star;
  double alpha = 0.0;
  double xi = 0.0;

  double upper() const { return alpha + xi; }
  double lower() const { return alpha - xi; }
};

/// Hyperplane { x : <u_star, x> = alpha }.
struct Hyperplane {
  GridFunction u_star;
  double alpha = 0.0;
};

enum class Sense { LessEqual, GreaterEqual };

/// Halfspace { x : <u_star, x> <= alpha } or { ... >= alpha }.
struct Halfspace {
  GridFunction u_star;
  double alpha = 0.0;
  Sense sense = Sense::LessEqual;
};

enum class StripePosition { Above, Inside, Below };

struct MinimizerSettings {
  double grad_tol = 1e-12;
  int max_iters = 200;
  double bracket_growth = 2.0;
  /// Relative feasibility tolerance (scaled by 1 + |alpha| + ||u*|| ||x||).
  double feas_tol = 1e-8;

  void validate() const;
};

/// Result of a Bregman projection onto an affine set.
struct Projection {
  GridFunction x;
  /// Multipliers: J(x_new) = J(x) - sum_k t_k u_k*.
  std::vector<double> t;
  int iterations = 0;
  double grad_norm = 0.0;
  /// Set when near-parallel normals forced a single-plane fallback.
  bool fell_back_to_single_plane = false;
};

struct KktReport {
  bool active[2] = {false, false};
  /// Multipliers in "<=" orientation; all nonnegative at a valid KKT point.
  double multiplier[2] = {0.0, 0.0};
  bool feasible[2] = {true, true};
  /// Number of affine projections tried before the KKT point was found.
  int candidates_tried = 0;
};

struct HalfspacePairProjection {
  GridFunction x;
  double t1 = 0.0;
  double t2 = 0.0;
  KktReport kkt;
};

/// Position of x relative to a closed stripe.
StripePosition classify(const GridFunction& x, const Stripe& s, const SpaceSpec& space);

/// The dual objective h(t) = (1/q*)||J(x) - sum t_k u_k||^{q*}_* + sum t_k alpha_k,
/// its gradient and the primal point J*(J(x) - sum t_k u_k). Exposed for
/// tests and diagnostics; the projections below are the intended entry points.
class DualObjective {
 public:
  DualObjective(const GridFunction& x, const std::vector<const GridFunction*>& normals,
                std::vector<double> alphas, const SpaceSpec& space);

  std::size_t dim() const { return normals_.size(); }
  double value(const std::vector<double>& t) const;
  /// dh/dt_j = alpha_j - <u_j, J*(J(x) - sum t_k u_k)>.
  std::vector<double> gradient(const std::vector<double>& t) const;
  GridFunction primal(const std::vector<double>& t) const;

  /// Magnitude used to make tolerances relative.
  double scale() const { return scale_; }

 private:
  GridFunction shifted_dual(const std::vector<double>& t) const;

  GridFunction jx_;
  std::vector<const GridFunction*> normals_;
  std::vector<double> alphas_;
  SpaceSpec space_;
  SpaceSpec dual_space_;
  double scale_ = 1.0;
};

/// Bregman projection onto H(u*, alpha) by a safeguarded Newton/bisection
/// search on the monotone derivative of the dual objective.
Projection project_hyperplane(const GridFunction& x, const GridFunction& u_star, double alpha,
                              const SpaceSpec& space, const MinimizerSettings& settings = {});

/// Bregman projection onto the intersection of hyperplanes by damped Newton on
/// the dual objective. Nearly parallel normals fall back to the first plane.
Projection project_intersection(const GridFunction& x, const std::vector<Hyperplane>& planes,
                                const SpaceSpec& space, const MinimizerSettings& settings = {});

/// Bregman projection onto a stripe: the violated bounding hyperplane, or x.
Projection project_stripe(const GridFunction& x, const Stripe& s, const SpaceSpec& space,
                          const MinimizerSettings& settings = {});

/// Bregman projection onto the intersection of two halfspaces, found by
/// testing the KKT conditions of the candidate active sets {1}, {2}, {1,2}.
HalfspacePairProjection project_two_halfspaces(const GridFunction& x, const Halfspace& h1,
                                               const Halfspace& h2, const SpaceSpec& space,
                                               const MinimizerSettings& settings = {});

/// Euclidean cosine of the angle between two grid functions.
double euclidean_cosine(const GridFunction& a, const GridFunction& b);

/// Feasibility tolerance for a constraint <u*, x> = alpha.
double feasibility_tolerance(const GridFunction& u_star, double alpha, const GridFunction& x,
                             const SpaceSpec& space, const MinimizerSettings& settings);

}  // namespace sesop
