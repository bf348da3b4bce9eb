#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sesop/bregman.hpp"
#include "sesop/forward_model.hpp"
#include "sesop/grid_function.hpp"
#include "sesop/lp_space.hpp"

namespace sesop {

enum class SearchDirections { One, Two };

struct SolverConfig {
  /// Lebesgue exponents of X = L^r and Y = L^s.
  double r = 1.5;
  double s = 5.0;
  /// Gauge of the duality map on X; 0 selects max(2, r).
  double p_gauge = 0.0;
  /// Tangential cone constant, 0 <= c_tc < 1.
  double c_tc = 0.01;
  /// Bound on ||F'||; 0 estimates it by power iteration at x0. Diagnostic only.
  double c_F = 0.0;
  /// Discrepancy parameter; must exceed (1+c_tc)/(1-c_tc) when delta > 0.
  double tau = 1.1 * 1.01 / 0.99;
  double delta = 0.0;
  /// Exact-data stopping tolerance on the residual norm.
  double T_Y = 5e-4;
  int max_outer = 500;
  SearchDirections directions = SearchDirections::One;
  MinimizerSettings minimizer{};
  /// Smoothness constant G_{p*} of X*; only enters logged decrement bounds.
  double G_dual = 1.0;
  /// Optional cap on |t|; unset means uncapped with a warning above 1e6.
  std::optional<double> t_cap;

  double gauge() const { return p_gauge > 0.0 ? p_gauge : std::max(2.0, r); }
  void validate() const;
};

enum class StepClass { None, SingleProjection, TwoPlaneCorrection };
enum class StopReason { Discrepancy, Tolerance, NotConverged, Stagnated, Failed };

const char* to_string(StepClass c);
const char* to_string(StopReason r);
StepClass step_class_from_string(const std::string& s);
StopReason stop_reason_from_string(const std::string& s);

/// State at x_n and the step taken from it (step fields empty on the last record).
struct IterationRecord {
  int n = 0;
  double residual_norm = 0.0;
  std::optional<double> rel_error;
  /// Multipliers relative to x_n: J(x_{n+1}) = J(x_n) - sum_k t_k u_k*.
  std::vector<double> t_params;
  std::vector<double> stripe_widths;
  std::optional<double> bregman_to_truth;
  StepClass step_class = StepClass::None;
  double wall_time = 0.0;

  /// Decrease surrogate S_n and angle factor gamma_n of the two-plane step.
  std::optional<double> decrease_surrogate;
  std::optional<double> gamma;
  /// Whether the ground truth lies in the stripe built at x_n.
  std::optional<bool> truth_in_stripe;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct DescentCheck {
  int n = 0;
  double before = 0.0;
  double after = 0.0;
  /// (1-c_tc)^p / (p G^{p-1} c_F^p) ||R_n||^p; logged, not enforced.
  double predicted_decrement = 0.0;
  bool violated = false;
};

struct ContainmentViolation {
  int n = 0;
  /// ||F(x) - F(z) - F'(x)(x - z)|| / ||F(x) - F(z)|| at the iterate x and truth z.
  double cone_ratio = 0.0;

  friend bool operator==(const ContainmentViolation&, const ContainmentViolation&) = default;
};

struct SolveReport {
  std::vector<IterationRecord> records;
  StopReason stop_reason = StopReason::NotConverged;
  std::string failure_detail;
  int n_star = 0;
  GridFunction final_iterate;
  double c_F = 0.0;
  double max_abs_t = 0.0;
  double wall_time = 0.0;
  int stripes_checked = 0;
  int stripes_containing_truth = 0;
  std::vector<ContainmentViolation> containment_violations;
  std::vector<std::string> warnings;
};

/// Spaces the solver works in for a grid with N interior nodes.
SpaceSpec x_space(const SolverConfig& cfg, int n_interior);
SpaceSpec y_space(const SolverConfig& cfg, int n_interior);

/// Stripe H(u*, alpha, xi) from the linearization at x_i, a dual direction w
/// and the residual R_i = F(x_i) - y. Returns nullopt if u* vanishes.
std::optional<Stripe> build_stripe(const Linearization& lin, const GridFunction& w,
                                   const GridFunction& residual, const SolverConfig& cfg);

struct StepResult {
  GridFunction x_next;
  Stripe stripe;
  std::vector<double> t;
  StepClass step_class = StepClass::SingleProjection;
  std::optional<double> decrease_surrogate;
  std::optional<double> gamma;
};

/// Method A: project x_n onto the stripe of the current Landweber direction.
StepResult landweber_step(const Linearization& lin, const GridFunction& residual,
                          const SolverConfig& cfg);

/// Method B: project onto the upper hyperplane of the current stripe, then
/// correct against the previous stripe if the intermediate point leaves it.
StepResult resesop_two_dir_step(const Linearization& lin, const GridFunction& residual,
                                const std::optional<Stripe>& prev_stripe,
                                const SolverConfig& cfg);

struct InverseProblem {
  const ForwardModel& model;
  GridFunction data;
};

/// Outer iteration until the discrepancy principle (delta > 0), the residual
/// tolerance T_Y (delta == 0) or max_outer.
SolveReport run(const InverseProblem& problem, const GridFunction& x0, const SolverConfig& cfg,
                const std::optional<GridFunction>& ground_truth = std::nullopt);

/// Checks D_p(x_{n+1}, z) <= D_p(x_n, z) + tol along the recorded distances.
std::vector<DescentCheck> descent_monitor(const std::vector<IterationRecord>& records,
                                          const SolverConfig& cfg, double c_F);

}  // namespace sesop
