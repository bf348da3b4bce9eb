#include "sesop/bregman.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sesop {

void MinimizerSettings::validate() const {
  if (!(grad_tol > 0.0)) throw DomainError("grad_tol must be positive");
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (!(bracket_growth > 1.0)) throw DomainError("bracket_growth must exceed 1");
  if (!(feas_tol > 0.0)) throw DomainError("feas_tol must be positive");
}

StripePosition classify(const GridFunction& x, const Stripe& s, const SpaceSpec& space) {
  const double v = dual_pairing(s.u_star, x, space);
  if (v > s.upper()) return StripePosition::Above;
  if (v < s.lower()) return StripePosition::Below;
  return StripePosition::Inside;
}

double euclidean_cosine(const GridFunction& a, const GridFunction& b) {
  a.check_shape(b);
  const double na = a.values().matrix().norm();
  const double nb = b.values().matrix().norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return (a.values() * b.values()).sum() / (na * nb);
}

double feasibility_tolerance(const GridFunction& u_star, double alpha, const GridFunction& x,
                             const SpaceSpec& space, const MinimizerSettings& settings) {
  const double un = weighted_norm(u_star, space.dual());
  const double xn = weighted_norm(x, space);
  return settings.feas_tol * (1.0 + std::abs(alpha) + un * xn);
}

// ---------------------------------------------------------------------------
// DualObjective

DualObjective::DualObjective(const GridFunction& x, const std::vector<const GridFunction*>& normals,
                             std::vector<double> alphas, const SpaceSpec& space)
    : jx_(duality_map(x, space)),
      normals_(normals),
      alphas_(std::move(alphas)),
      space_(space),
      dual_space_(space.dual()) {
  if (normals_.size() != alphas_.size() || normals_.empty()) {
    throw DimensionError("DualObjective needs one alpha per normal");
  }
  const double xn = weighted_norm(x, space_);
  scale_ = 1.0;
  for (std::size_t k = 0; k < normals_.size(); ++k) {
    normals_[k]->check_shape(x);
    scale_ += std::abs(alphas_[k]) + weighted_norm(*normals_[k], dual_space_) * xn;
  }
}

GridFunction DualObjective::shifted_dual(const std::vector<double>& t) const {
  GridFunction y = jx_;
  for (std::size_t k = 0; k < normals_.size(); ++k) {
    if (t[k] != 0.0) y.values() -= t[k] * normals_[k]->values();
  }
  return y;
}

double DualObjective::value(const std::vector<double>& t) const {
  const GridFunction y = shifted_dual(t);
  const double q_conj = dual_space_.gauge_exponent();
  double v = std::pow(weighted_norm(y, dual_space_), q_conj) / q_conj;
  for (std::size_t k = 0; k < normals_.size(); ++k) v += t[k] * alphas_[k];
  return v;
}

GridFunction DualObjective::primal(const std::vector<double>& t) const {
  return inverse_duality_map(shifted_dual(t), space_);
}

std::vector<double> DualObjective::gradient(const std::vector<double>& t) const {
  const GridFunction x = primal(t);
  std::vector<double> g(normals_.size());
  for (std::size_t k = 0; k < normals_.size(); ++k) {
    g[k] = alphas_[k] - dual_pairing(*normals_[k], x, space_);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Single hyperplane: root of the increasing function h'(t).

Projection project_hyperplane(const GridFunction& x, const GridFunction& u_star, double alpha,
                              const SpaceSpec& space, const MinimizerSettings& settings) {
  settings.validate();
  if (u_star.is_zero()) throw DomainError("hyperplane normal must be nonzero");

  const DualObjective obj(x, {&u_star}, {alpha}, space);
  const double tol = settings.grad_tol * obj.scale();
  auto deriv = [&](double t) { return obj.gradient({t})[0]; };

  Projection out;
  double g0 = deriv(0.0);
  if (std::abs(g0) <= tol) {
    out.x = x;
    out.t = {0.0};
    out.grad_norm = std::abs(g0);
    return out;
  }

  // h' is nondecreasing, so the root lies on the side where h' changes sign.
  const double dir = g0 < 0.0 ? 1.0 : -1.0;
  const double u_sq = dual_pairing(u_star, u_star, space);
  double step = std::abs(g0) / u_sq;
  if (!std::isfinite(step) || step == 0.0) step = 1.0;

  double lo = 0.0, g_lo = g0;  // lo: last point with the same sign as g0
  double hi = dir * step, g_hi = deriv(hi);
  int iters = 1;
  while (g_hi * g0 > 0.0) {
    if (std::abs(g_hi) <= tol) break;
    if (++iters > settings.max_iters) {
      throw ConvergenceError("hyperplane projection: no sign change while bracketing",
                             {hi}, std::abs(g_hi));
    }
    lo = hi;
    g_lo = g_hi;
    step *= settings.bracket_growth;
    hi = lo + dir * step;
    g_hi = deriv(hi);
  }

  double t = std::abs(g_lo) < std::abs(g_hi) ? lo : hi;
  double g = std::abs(g_lo) < std::abs(g_hi) ? g_lo : g_hi;
  bool force_bisect = false;
  const double eps = std::numeric_limits<double>::epsilon();

  while (std::abs(g) > tol) {
    if (++iters > settings.max_iters) {
      throw ConvergenceError("hyperplane projection: Newton/bisection did not converge",
                             {t}, std::abs(g));
    }
    const double a = std::min(lo, hi), b = std::max(lo, hi);
    if (b - a <= 4.0 * eps * std::max(std::abs(a), std::abs(b))) break;

    double candidate = std::numeric_limits<double>::quiet_NaN();
    if (!force_bisect) {
      const double fd = 1e-7 * std::max(std::abs(t), b - a);
      const double slope = (deriv(t + fd) - g) / fd;
      if (slope > 0.0) candidate = t - g / slope;
    }
    if (!(candidate > a && candidate < b)) candidate = 0.5 * (a + b);

    const double g_new = deriv(candidate);
    force_bisect = std::abs(g_new) > 0.5 * std::abs(g);
    t = candidate;
    g = g_new;
    if (g * g0 > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
  }

  out.t = {t};
  out.x = obj.primal(out.t);
  out.iterations = iters;
  out.grad_norm = std::abs(g);
  return out;
}

// ---------------------------------------------------------------------------
// Several hyperplanes: damped Newton with a finite-difference Hessian.

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

Projection project_intersection(const GridFunction& x, const std::vector<Hyperplane>& planes,
                                const SpaceSpec& space, const MinimizerSettings& settings) {
  settings.validate();
  if (planes.empty()) throw DimensionError("project_intersection needs at least one plane");
  for (const auto& p : planes) {
    if (p.u_star.is_zero()) throw DomainError("hyperplane normal must be nonzero");
  }
  if (planes.size() == 1) {
    return project_hyperplane(x, planes[0].u_star, planes[0].alpha, space, settings);
  }

  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      if (std::abs(euclidean_cosine(planes[i].u_star, planes[j].u_star)) >= 1.0 - 1e-12) {
        Projection p = project_hyperplane(x, planes[0].u_star, planes[0].alpha, space, settings);
        p.t.resize(planes.size(), 0.0);
        p.fell_back_to_single_plane = true;
        return p;
      }
    }
  }

  const auto m = static_cast<Eigen::Index>(planes.size());
  std::vector<const GridFunction*> normals;
  std::vector<double> alphas;
  for (const auto& p : planes) {
    normals.push_back(&p.u_star);
    alphas.push_back(p.alpha);
  }
  const DualObjective obj(x, normals, alphas, space);
  const double tol = settings.grad_tol * obj.scale();

  // Gram matrix in the weighted Euclidean pairing: the exact Hessian in the
  // Hilbert case, used for the starting point and as a fallback metric.
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      gram(i, j) = dual_pairing(planes[i].u_star, planes[j].u_star, space);
  const Eigen::LDLT<Eigen::MatrixXd> gram_ldlt(gram);

  const SpaceSpec dual_space = space.dual();
  const double jx_norm = weighted_norm(duality_map(x, space), dual_space);
  Eigen::VectorXd t_char(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double un = weighted_norm(planes[k].u_star, dual_space);
    t_char(k) = jx_norm > 0.0 ? jx_norm / un : 1.0 / un;
  }

  std::vector<double> t0(planes.size(), 0.0);
  Eigen::VectorXd grad = to_eigen(obj.gradient(t0));
  Eigen::VectorXd t = Eigen::VectorXd::Zero(m);
  if (gram_ldlt.info() == Eigen::Success && gram_ldlt.isPositive()) {
    const Eigen::VectorXd guess = gram_ldlt.solve(-grad);
    if (guess.allFinite()) {
      const Eigen::VectorXd g_guess = to_eigen(obj.gradient(to_std(guess)));
      if (g_guess.norm() < grad.norm()) {
        t = guess;
        grad = g_guess;
      }
    }
  }

  int iters = 0;
  double h_val = obj.value(to_std(t));
  while (grad.lpNorm<Eigen::Infinity>() > tol) {
    if (++iters > settings.max_iters) {
      throw ConvergenceError("intersection projection: Newton did not converge", to_std(t),
                             grad.lpNorm<Eigen::Infinity>());
    }

    Eigen::MatrixXd hess(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double fd = 1e-7 * std::max({std::abs(t(j)), t.lpNorm<Eigen::Infinity>(), t_char(j)});
      Eigen::VectorXd tp = t;
      tp(j) += fd;
      hess.col(j) = (to_eigen(obj.gradient(to_std(tp))) - grad) / fd;
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    Eigen::VectorXd dir;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
        ldlt.vectorD().minCoeff() > 1e-14 * ldlt.vectorD().maxCoeff()) {
      dir = ldlt.solve(-grad);
    }
    if (dir.size() == 0 || !dir.allFinite() || dir.dot(grad) >= 0.0) {
      dir = gram_ldlt.solve(-grad);
      if (!dir.allFinite() || dir.dot(grad) >= 0.0) dir = -grad;
    }

    // Backtracking; accept on Armijo decrease of h or on a gradient-norm
    // decrease, since h itself stalls at rounding level near the optimum.
    const double slope = grad.dot(dir);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd trial = t + step * dir;
      const auto trial_std = to_std(trial);
      const double h_trial = obj.value(trial_std);
      const Eigen::VectorXd g_trial = to_eigen(obj.gradient(trial_std));
      if (std::isfinite(h_trial) &&
          (h_trial <= h_val + 1e-4 * step * slope ||
           g_trial.norm() < (1.0 - 1e-4 * step) * grad.norm())) {
        t = trial;
        grad = g_trial;
        h_val = h_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "intersection projection: line search failed at |grad|="
          << grad.lpNorm<Eigen::Infinity>() << " (tol " << tol << ")";
      throw ConvergenceError(msg.str(), to_std(t), grad.lpNorm<Eigen::Infinity>());
    }
  }

  Projection out;
  out.t = to_std(t);
  out.x = obj.primal(out.t);
  out.iterations = iters;
  out.grad_norm = grad.lpNorm<Eigen::Infinity>();
  return out;
}

Projection project_stripe(const GridFunction& x, const Stripe& s, const SpaceSpec& space,
                          const MinimizerSettings& settings) {
  switch (classify(x, s, space)) {
    case StripePosition::Above:
      return project_hyperplane(x, s.u_star, s.upper(), space, settings);
    case StripePosition::Below:
      return project_hyperplane(x, s.u_star, s.lower(), space, settings);
    case StripePosition::Inside:
      break;
  }
  Projection out;
  out.x = x;
  out.t = {0.0};
  return out;
}

// ---------------------------------------------------------------------------
// Two halfspaces.

HalfspacePairProjection project_two_halfspaces(const GridFunction& x, const Halfspace& h1,
                                               const Halfspace& h2, const SpaceSpec& space,
                                               const MinimizerSettings& settings) {
  // Work in "<=" orientation: <v_k, x> <= beta_k.
  auto oriented = [](const Halfspace& h) {
    const double sign = h.sense == Sense::LessEqual ? 1.0 : -1.0;
    return Hyperplane{sign * h.u_star, sign * h.alpha};
  };
  const Hyperplane p[2] = {oriented(h1), oriented(h2)};
  const double sign[2] = {h1.sense == Sense::LessEqual ? 1.0 : -1.0,
                          h2.sense == Sense::LessEqual ? 1.0 : -1.0};

  auto violation = [&](int k, const GridFunction& z) {
    return dual_pairing(p[k].u_star, z, space) - p[k].alpha;
  };
  auto tol = [&](int k, const GridFunction& z) {
    return feasibility_tolerance(p[k].u_star, p[k].alpha, z, space, settings);
  };

  HalfspacePairProjection out;
  const bool ok0 = violation(0, x) <= tol(0, x);
  const bool ok1 = violation(1, x) <= tol(1, x);
  if (ok0 && ok1) {
    out.x = x;
    return out;
  }

  auto finish = [&](GridFunction z, double m0, double m1) {
    out.x = std::move(z);
    out.kkt.multiplier[0] = m0;
    out.kkt.multiplier[1] = m1;
    out.kkt.active[0] = m0 != 0.0;
    out.kkt.active[1] = m1 != 0.0;
    out.kkt.feasible[0] = violation(0, out.x) <= tol(0, out.x);
    out.kkt.feasible[1] = violation(1, out.x) <= tol(1, out.x);
    out.t1 = sign[0] * m0;
    out.t2 = sign[1] * m1;
    return out;
  };

  // Active set {k}: only meaningful when x violates constraint k, which makes
  // the single-plane multiplier positive.
  const bool ok[2] = {ok0, ok1};
  for (int k = 0; k < 2; ++k) {
    if (ok[k]) continue;
    ++out.kkt.candidates_tried;
    Projection single = project_hyperplane(x, p[k].u_star, p[k].alpha, space, settings);
    const int other = 1 - k;
    if (violation(other, single.x) <= tol(other, single.x)) {
      return k == 0 ? finish(std::move(single.x), single.t[0], 0.0)
                    : finish(std::move(single.x), 0.0, single.t[0]);
    }
  }

  ++out.kkt.candidates_tried;
  Projection both = project_intersection(x, {p[0], p[1]}, space, settings);
  if (both.fell_back_to_single_plane) {
    throw GeometryError("two-halfspace projection: normals are parallel and no single-plane "
                        "projection is feasible");
  }
  const double t_scale = std::abs(both.t[0]) + std::abs(both.t[1]);
  if (both.t[0] < -1e-9 * t_scale || both.t[1] < -1e-9 * t_scale) {
    std::ostringstream msg;
    msg << "two-halfspace projection: no active set satisfies KKT (multipliers " << both.t[0]
        << ", " << both.t[1] << ")";
    throw GeometryError(msg.str());
  }
  return finish(std::move(both.x), std::max(both.t[0], 0.0), std::max(both.t[1], 0.0));
}

}  // namespace sesop
