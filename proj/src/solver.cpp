#include "sesop/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sesop {

void SolverConfig::validate() const {
  if (!(r > 1.0) || !(s > 1.0)) throw DomainError("space exponents must exceed 1");
  if (!(gauge() > 1.0)) throw DomainError("gauge exponent must exceed 1");
  if (!(c_tc >= 0.0 && c_tc < 1.0)) throw DomainError("c_tc must lie in [0, 1)");
  if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
  if (delta > 0.0 && !(tau > (1.0 + c_tc) / (1.0 - c_tc))) {
    throw DomainError("tau must exceed (1 + c_tc)/(1 - c_tc) for noisy data");
  }
  if (!(T_Y >= 0.0)) throw DomainError("T_Y must be nonnegative");
  if (max_outer < 0) throw DomainError("max_outer must be nonnegative");
  if (!(G_dual > 0.0)) throw DomainError("G_dual must be positive");
  if (c_F < 0.0) throw DomainError("c_F must be nonnegative");
  minimizer.validate();
}

const char* to_string(StepClass c) {
  switch (c) {
    case StepClass::None: return "None";
    case StepClass::SingleProjection: return "SingleProjection";
    case StepClass::TwoPlaneCorrection: return "TwoPlaneCorrection";
  }
  return "None";
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Discrepancy: return "Discrepancy";
    case StopReason::Tolerance: return "Tolerance";
    case StopReason::NotConverged: return "NotConverged";
    case StopReason::Stagnated: return "Stagnated";
    case StopReason::Failed: return "Failed";
  }
  return "Failed";
}

StepClass step_class_from_string(const std::string& s) {
  if (s == "None") return StepClass::None;
  if (s == "SingleProjection") return StepClass::SingleProjection;
  if (s == "TwoPlaneCorrection") return StepClass::TwoPlaneCorrection;
  throw ParseError("unknown step class '" + s + "'");
}

StopReason stop_reason_from_string(const std::string& s) {
  if (s == "Discrepancy") return StopReason::Discrepancy;
  if (s == "Tolerance") return StopReason::Tolerance;
  if (s == "NotConverged") return StopReason::NotConverged;
  if (s == "Stagnated") return StopReason::Stagnated;
  if (s == "Failed") return StopReason::Failed;
  throw ParseError("unknown stop reason '" + s + "'");
}

SpaceSpec x_space(const SolverConfig& cfg, int n_interior) {
  return SpaceSpec::on_grid(cfg.r, cfg.gauge(), n_interior);
}

SpaceSpec y_space(const SolverConfig& cfg, int n_interior) {
  return SpaceSpec::on_grid(cfg.s, 2.0, n_interior);
}

std::optional<Stripe> build_stripe(const Linearization& lin, const GridFunction& w,
                                   const GridFunction& residual, const SolverConfig& cfg) {
  const GridFunction& x = lin.parameter();
  const SpaceSpec xs = x_space(cfg, x.n_interior());
  const SpaceSpec ys = y_space(cfg, residual.n_interior());

  GridFunction u_star = lin.adjoint(w);
  if (u_star.is_zero()) return std::nullopt;

  const double alpha = dual_pairing(u_star, x, xs) - dual_pairing(w, residual, ys);
  const double res_norm = weighted_norm(residual, ys);
  const double w_norm = weighted_norm(w, ys.dual());
  const double xi = (cfg.delta + cfg.c_tc * (res_norm + cfg.delta)) * w_norm;
  return Stripe{std::move(u_star), alpha, xi};
}

namespace {

// w_n = J_2^Y(R_n) and its stripe; x_n must lie strictly above it.
Stripe current_stripe(const Linearization& lin, const GridFunction& residual,
                      const SolverConfig& cfg) {
  const SpaceSpec ys = y_space(cfg, residual.n_interior());
  const GridFunction w = duality_map(residual, ys);
  std::optional<Stripe> stripe = build_stripe(lin, w, residual, cfg);
  if (!stripe) throw GeometryError("search direction F'(x)* J(R) vanished");

  const SpaceSpec xs = x_space(cfg, lin.parameter().n_interior());
  const double v = dual_pairing(stripe->u_star, lin.parameter(), xs);
  if (!(v > stripe->upper())) {
    std::ostringstream msg;
    msg << "iterate is not above its stripe: <u*,x> = " << v << ", alpha + xi = "
        << stripe->upper();
    throw std::logic_error(msg.str());
  }
  return *stripe;
}

}  // namespace

StepResult landweber_step(const Linearization& lin, const GridFunction& residual,
                          const SolverConfig& cfg) {
  const SpaceSpec xs = x_space(cfg, lin.parameter().n_interior());
  Stripe stripe = current_stripe(lin, residual, cfg);
  Projection p = project_stripe(lin.parameter(), stripe, xs, cfg.minimizer);
  StepResult out;
  out.x_next = std::move(p.x);
  out.t = std::move(p.t);
  out.stripe = std::move(stripe);
  out.step_class = StepClass::SingleProjection;
  return out;
}

StepResult resesop_two_dir_step(const Linearization& lin, const GridFunction& residual,
                                const std::optional<Stripe>& prev_stripe,
                                const SolverConfig& cfg) {
  const GridFunction& x = lin.parameter();
  const SpaceSpec xs = x_space(cfg, x.n_interior());
  Stripe stripe = current_stripe(lin, residual, cfg);

  // (i) onto the upper bounding hyperplane of the current stripe.
  Projection first = project_hyperplane(x, stripe.u_star, stripe.upper(), xs, cfg.minimizer);

  StepResult out;
  const StripePosition pos =
      prev_stripe ? classify(first.x, *prev_stripe, xs) : StripePosition::Inside;
  if (pos == StripePosition::Inside) {
    out.x_next = std::move(first.x);
    out.t = {first.t[0]};
    out.stripe = std::move(stripe);
    out.step_class = StepClass::SingleProjection;
    return out;
  }

  // (ii) onto the intersection with the violated bounding hyperplane of the
  // previous stripe.
  const double bound = pos == StripePosition::Above ? prev_stripe->upper() : prev_stripe->lower();
  const std::vector<Hyperplane> planes = {{stripe.u_star, stripe.upper()},
                                          {prev_stripe->u_star, bound}};
  Projection second = project_intersection(first.x, planes, xs, cfg.minimizer);

  // Diagnostics: angle factor gamma_n and decrease surrogate S_n.
  const double p = xs.gauge_exponent();
  const double p_conj = conjugate_exponent(p);
  const SpaceSpec xs_dual = xs.dual();
  const GridFunction j_prev = inverse_duality_map(prev_stripe->u_star, xs);
  const double cosine = std::abs(dual_pairing(stripe.u_star, j_prev, xs)) /
                        (weighted_norm(stripe.u_star, xs_dual) * weighted_norm(j_prev, xs));
  const double gamma_base =
      1.0 - std::pow(cosine, p) / ((p - 1.0) * std::pow(cfg.G_dual, p - 1.0));
  if (gamma_base > 0.0) {
    const double gamma = std::pow(gamma_base, 1.0 / p_conj);
    const SpaceSpec ys = y_space(cfg, residual.n_interior());
    const double rn = weighted_norm(residual, ys);
    const double lead = rn - cfg.delta - cfg.c_tc * (rn + cfg.delta);
    const double gap = std::abs(dual_pairing(prev_stripe->u_star, first.x, xs) - bound);
    double surrogate =
        std::pow(gap / (gamma * weighted_norm(prev_stripe->u_star, xs_dual)), p);
    if (cfg.c_F > 0.0) surrogate += std::pow(std::max(lead, 0.0) / cfg.c_F, p);
    out.gamma = gamma;
    out.decrease_surrogate = surrogate;
  } else {
    out.gamma = 0.0;
  }

  out.x_next = std::move(second.x);
  out.t = {first.t[0] + second.t[0], second.t[1]};
  out.stripe = std::move(stripe);
  out.step_class = second.fell_back_to_single_plane ? StepClass::SingleProjection
                                                    : StepClass::TwoPlaneCorrection;
  return out;
}

SolveReport run(const InverseProblem& problem, const GridFunction& x0, const SolverConfig& cfg_in,
                const std::optional<GridFunction>& ground_truth) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();

  cfg_in.validate();
  SolverConfig cfg = cfg_in;
  if (!x0.all_finite()) throw DomainError("initial value contains non-finite entries");
  x0.check_shape(problem.data);
  if (ground_truth) ground_truth->check_shape(x0);

  const int n_grid = x0.n_interior();
  const SpaceSpec xs = x_space(cfg, n_grid);
  const SpaceSpec ys = y_space(cfg, n_grid);
  const bool noisy = cfg.delta > 0.0;

  SolveReport report;
  GridFunction x = x0;
  std::optional<Stripe> prev_stripe;
  std::optional<GridFunction> truth_image;
  std::optional<double> truth_norm;
  if (ground_truth) truth_norm = weighted_norm(*ground_truth, xs);
  int stagnant = 0;

  auto finish = [&](StopReason reason, int n) {
    if (!cfg.t_cap && report.max_abs_t > 1e6) {
      report.warnings.push_back("step parameter |t| exceeded 1e6");
    }
    report.stop_reason = reason;
    report.n_star = n;
    report.final_iterate = x;
    report.wall_time = std::chrono::duration<double>(clock::now() - t_start).count();
    return report;
  };

  std::shared_ptr<const Linearization> lin;
  try {
    lin = problem.model.linearize(x);
    report.c_F = cfg.c_F > 0.0 ? cfg.c_F : operator_norm_estimate(*lin);
    cfg.c_F = report.c_F;
  } catch (const Error& e) {
    report.failure_detail = e.what();
    return finish(StopReason::Failed, 0);
  }

  for (int n = 0;; ++n) {
    const auto t_iter = clock::now();
    IterationRecord rec;
    rec.n = n;
    const GridFunction residual = lin->value() - problem.data;
    rec.residual_norm = weighted_norm(residual, ys);
    if (ground_truth) {
      rec.rel_error = weighted_norm(x - *ground_truth, xs) / *truth_norm;
      rec.bregman_to_truth = bregman_distance(x, *ground_truth, xs);
    }

    auto close = [&](StopReason reason) {
      rec.wall_time = std::chrono::duration<double>(clock::now() - t_iter).count();
      report.records.push_back(rec);
      return finish(reason, n);
    };

    if (noisy && rec.residual_norm <= cfg.tau * cfg.delta) return close(StopReason::Discrepancy);
    if (!noisy && rec.residual_norm <= cfg.T_Y) return close(StopReason::Tolerance);
    if (n >= cfg.max_outer) return close(StopReason::NotConverged);

    StepResult step;
    try {
      step = cfg.directions == SearchDirections::One
                 ? landweber_step(*lin, residual, cfg)
                 : resesop_two_dir_step(*lin, residual, prev_stripe, cfg);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "iteration " << n << ": " << e.what();
      report.failure_detail = msg.str();
      return close(StopReason::Failed);
    }

    rec.t_params = step.t;
    rec.stripe_widths = {step.stripe.xi};
    if (step.step_class == StepClass::TwoPlaneCorrection) {
      rec.stripe_widths.push_back(prev_stripe->xi);
    }
    rec.step_class = step.step_class;
    rec.decrease_surrogate = step.decrease_surrogate;
    rec.gamma = step.gamma;

    if (ground_truth) {
      const bool inside = classify(*ground_truth, step.stripe, xs) == StripePosition::Inside;
      rec.truth_in_stripe = inside;
      ++report.stripes_checked;
      if (inside) {
        ++report.stripes_containing_truth;
      } else {
        try {
          if (!truth_image) truth_image = problem.model.linearize(*ground_truth)->value();
          const GridFunction diff = lin->value() - *truth_image;
          const GridFunction rem = diff - lin->derivative(x - *ground_truth);
          report.containment_violations.push_back(
              {n, weighted_norm(rem, ys) / weighted_norm(diff, ys)});
        } catch (const Error& e) {
          report.warnings.push_back(std::string("cone ratio unavailable: ") + e.what());
        }
      }
    }

    for (double t : step.t) report.max_abs_t = std::max(report.max_abs_t, std::abs(t));
    if (cfg.t_cap && report.max_abs_t > *cfg.t_cap) {
      std::ostringstream msg;
      msg << "iteration " << n << ": |t| = " << report.max_abs_t << " exceeds cap " << *cfg.t_cap;
      report.failure_detail = msg.str();
      return close(StopReason::Failed);
    }

    const double moved = weighted_norm(step.x_next - x, xs);
    const double size = weighted_norm(x, xs);
    stagnant = moved < 1e-14 * size ? stagnant + 1 : 0;

    prev_stripe = std::move(step.stripe);
    x = std::move(step.x_next);
    rec.wall_time = std::chrono::duration<double>(clock::now() - t_iter).count();
    report.records.push_back(std::move(rec));

    if (stagnant >= 3) {
      // Re-evaluate at the final iterate so the report ends on a full record.
      ++n;
      IterationRecord last;
      last.n = n;
      try {
        lin = problem.model.linearize(x);
        last.residual_norm = weighted_norm(lin->value() - problem.data, ys);
      } catch (const Error&) {
      }
      if (ground_truth) {
        last.rel_error = weighted_norm(x - *ground_truth, xs) / *truth_norm;
        last.bregman_to_truth = bregman_distance(x, *ground_truth, xs);
      }
      report.records.push_back(last);
      return finish(StopReason::Stagnated, n);
    }

    try {
      lin = problem.model.linearize(x);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "iteration " << n + 1 << ": " << e.what();
      report.failure_detail = msg.str();
      return finish(StopReason::Failed, n + 1);
    }
  }
}

std::vector<DescentCheck> descent_monitor(const std::vector<IterationRecord>& records,
                                          const SolverConfig& cfg, double c_F) {
  std::vector<DescentCheck> out;
  double scale = 0.0;
  for (const auto& r : records) {
    if (r.bregman_to_truth) scale = std::max(scale, *r.bregman_to_truth);
  }
  const double tol = 1e-9 * std::max(scale, 1.0);
  const double p = cfg.gauge();
  const double constant =
      c_F > 0.0 ? std::pow(1.0 - cfg.c_tc, p) /
                      (p * std::pow(cfg.G_dual, p - 1.0) * std::pow(c_F, p))
                : 0.0;

  for (std::size_t k = 0; k + 1 < records.size(); ++k) {
    const auto& a = records[k];
    const auto& b = records[k + 1];
    if (!a.bregman_to_truth || !b.bregman_to_truth) continue;
    DescentCheck check;
    check.n = a.n;
    check.before = *a.bregman_to_truth;
    check.after = *b.bregman_to_truth;
    check.predicted_decrement = constant * std::pow(a.residual_norm, p);
    check.violated = check.after > check.before + tol;
    out.push_back(check);
  }
  return out;
}

}  // namespace sesop
