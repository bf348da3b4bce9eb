#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sesop/elliptic.hpp"
#include "sesop/experiment.hpp"
#include "sesop/solver.hpp"

using namespace sesop;

namespace {

// F(x) = A vec(x) on grids of equal size; the adjoint is A^T under the
// shared h^2 pairing.
class LinearState final : public Linearization {
 public:
  LinearState(GridFunction x, const Eigen::MatrixXd& a) : x_(std::move(x)), a_(a) {
    u_ = apply(a_, x_);
  }
  const GridFunction& parameter() const override { return x_; }
  const GridFunction& value() const override { return u_; }
  GridFunction derivative(const GridFunction& h) const override { return apply(a_, h); }
  GridFunction adjoint(const GridFunction& w) const override {
    return apply(a_.transpose(), w);
  }

  static GridFunction apply(const Eigen::MatrixXd& a, const GridFunction& x) {
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.values().data(), x.size());
    Eigen::VectorXd out = a * v;
    GridFunction g(x.n_interior());
    Eigen::Map<Eigen::VectorXd>(g.values().data(), g.size()) = out;
    return g;
  }

 private:
  GridFunction x_;
  GridFunction u_;
  Eigen::MatrixXd a_;
};

class LinearModel final : public ForwardModel {
 public:
  explicit LinearModel(Eigen::MatrixXd a) : a_(std::move(a)) {}
  std::shared_ptr<const Linearization> linearize(const GridFunction& x) const override {
    return std::make_shared<LinearState>(x, a_);
  }
  const Eigen::MatrixXd& matrix() const { return a_; }

 private:
  Eigen::MatrixXd a_;
};

Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng) {
  const int m = (n + 2) * (n + 2);
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = d(rng) / std::sqrt(m);
  return a;
}

SolverConfig hilbert_config() {
  SolverConfig cfg;
  cfg.r = 2.0;
  cfg.s = 2.0;
  cfg.c_tc = 0.0;
  return cfg;
}

}  // namespace

TEST(SolverConfig, DefaultsAndValidation) {
  SolverConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.gauge(), 2.0);
  cfg.r = 3.0;
  EXPECT_DOUBLE_EQ(cfg.gauge(), 3.0);
  cfg.p_gauge = 1.5;
  EXPECT_DOUBLE_EQ(cfg.gauge(), 1.5);
  EXPECT_NO_THROW(cfg.validate());

  SolverConfig bad;
  bad.c_tc = 1.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = {};
  bad.delta = 1e-3;
  bad.tau = 1.01 / 0.99;
  EXPECT_THROW(bad.validate(), DomainError);
  bad.tau = 1.05;
  EXPECT_NO_THROW(bad.validate());
}

TEST(SolverEnums, StringRoundTrip) {
  for (auto c : {StepClass::None, StepClass::SingleProjection, StepClass::TwoPlaneCorrection})
    EXPECT_EQ(step_class_from_string(to_string(c)), c);
  for (auto r : {StopReason::Discrepancy, StopReason::Tolerance, StopReason::NotConverged,
                 StopReason::Stagnated, StopReason::Failed})
    EXPECT_EQ(stop_reason_from_string(to_string(r)), r);
  EXPECT_THROW(stop_reason_from_string("Bogus"), ParseError);
}

TEST(BuildStripe, WidthFormulas) {
  std::mt19937_64 rng(1);
  const int n = 3;
  const LinearState lin(oracle::random_grid(n, rng), random_matrix(n, rng));
  const auto w = oracle::random_grid(n, rng);
  const auto res = oracle::random_grid(n, rng);

  SolverConfig cfg;
  cfg.c_tc = 0.0;
  EXPECT_EQ(build_stripe(lin, w, res, cfg)->xi, 0.0);

  cfg.c_tc = 0.05;
  // Y = L^5 so the dual norm is L^{5/4}.
  const double wn = oracle::norm(w, 1.25), rn = oracle::norm(res, 5.0);
  EXPECT_NEAR(build_stripe(lin, w, res, cfg)->xi, 0.05 * wn * rn, 1e-14);

  cfg.delta = 1e-2;
  cfg.tau = 2.0;
  EXPECT_NEAR(build_stripe(lin, w, res, cfg)->xi, (1e-2 + 0.05 * (rn + 1e-2)) * wn, 1e-14);

  const auto s = *build_stripe(lin, w, res, cfg);
  const auto u_star = lin.adjoint(w);
  EXPECT_LT(oracle::max_abs_diff(s.u_star, u_star), 1e-15);
  EXPECT_NEAR(s.alpha, oracle::pairing(u_star, lin.parameter()) - oracle::pairing(w, res), 1e-13);
}

TEST(BuildStripe, ZeroDirectionRejected) {
  std::mt19937_64 rng(2);
  const LinearState lin(oracle::random_grid(2, rng), Eigen::MatrixXd::Zero(16, 16));
  EXPECT_FALSE(build_stripe(lin, oracle::random_grid(2, rng), oracle::random_grid(2, rng),
                            SolverConfig{})
                   .has_value());
}

TEST(LandweberStep, HilbertMatchesClassicalLandweber) {
  std::mt19937_64 rng(3);
  const int n = 3;
  for (int k = 0; k < 20; ++k) {
    const auto a = random_matrix(n, rng);
    const auto x = oracle::random_grid(n, rng);
    const auto y = oracle::random_grid(n, rng);
    const LinearState lin(x, a);
    const auto res = lin.value() - y;
    const auto step = landweber_step(lin, res, hilbert_config());

    const auto g = LinearState::apply(a.transpose(), res);
    const double t = oracle::pairing(res, res) / oracle::pairing(g, g);
    EXPECT_LT(oracle::max_abs_diff(step.x_next, x - t * g), 1e-10);
    EXPECT_NEAR(step.t[0], t, 1e-10 * t);
    EXPECT_EQ(step.step_class, StepClass::SingleProjection);
  }
}

TEST(LandweberStep, HilbertDecrement) {
  std::mt19937_64 rng(4);
  const int n = 3;
  const auto a = random_matrix(n, rng);
  const auto z = oracle::random_grid(n, rng);
  const auto y = LinearState::apply(a, z);
  const auto sp = SpaceSpec::on_grid(2.0, 2.0, n);
  const LinearState lin(oracle::random_grid(n, rng), a);
  const auto res = lin.value() - y;
  const auto step = landweber_step(lin, res, hilbert_config());
  const auto g = LinearState::apply(a.transpose(), res);
  const double rr = oracle::pairing(res, res);
  const double decrement =
      bregman_distance(lin.parameter(), z, sp) - bregman_distance(step.x_next, z, sp);
  EXPECT_GE(decrement, rr * rr / (2.0 * oracle::pairing(g, g)) - 1e-12);
}

TEST(TwoDirStep, NoPreviousStripeIsStepOne) {
  std::mt19937_64 rng(5);
  const int n = 3;
  const LinearState lin(oracle::random_grid(n, rng), random_matrix(n, rng));
  const auto res = lin.value() - oracle::random_grid(n, rng);
  auto cfg = hilbert_config();
  cfg.c_tc = 0.1;
  const auto step = resesop_two_dir_step(lin, res, std::nullopt, cfg);
  const auto& s = step.stripe;
  EXPECT_EQ(step.step_class, StepClass::SingleProjection);
  EXPECT_LT(oracle::max_abs_diff(step.x_next,
                                 oracle::euclid_hyperplane(lin.parameter(), s.u_star, s.upper())),
            1e-10);
}

TEST(TwoDirStep, InsidePreviousStripeIsUnchanged) {
  std::mt19937_64 rng(6);
  const int n = 3;
  const LinearState lin(oracle::random_grid(n, rng), random_matrix(n, rng));
  const auto res = lin.value() - oracle::random_grid(n, rng);
  const auto cfg = hilbert_config();
  const auto alone = resesop_two_dir_step(lin, res, std::nullopt, cfg);
  // A previous stripe wide enough to contain everything nearby.
  const Stripe wide{oracle::random_grid(n, rng), 0.0, 1e6};
  const auto step = resesop_two_dir_step(lin, res, wide, cfg);
  EXPECT_TRUE(step.x_next == alone.x_next);
  EXPECT_EQ(step.t.size(), 1u);
}

TEST(TwoDirStep, HilbertMatchesDenseOracle) {
  std::mt19937_64 rng(7);
  const int n = 3;
  int corrected = 0;
  for (int k = 0; k < 30; ++k) {
    const auto a = random_matrix(n, rng);
    const LinearModel model(a);
    const auto y = oracle::random_grid(n, rng);
    auto cfg = hilbert_config();
    cfg.c_tc = 0.05 * (k % 3);

    const auto lin0 = model.linearize(oracle::random_grid(n, rng));
    const auto first = resesop_two_dir_step(*lin0, lin0->value() - y, std::nullopt, cfg);
    const auto lin1 = model.linearize(first.x_next);
    const auto res1 = lin1->value() - y;
    const auto step = resesop_two_dir_step(*lin1, res1, first.stripe, cfg);

    const auto& cur = step.stripe;
    const auto& prev = first.stripe;
    const auto x = lin1->parameter();
    const auto x_tilde = oracle::euclid_hyperplane(x, cur.u_star, cur.upper());
    const double v = oracle::pairing(prev.u_star, x_tilde);
    GridFunction want = x_tilde;
    if (v > prev.upper() || v < prev.lower()) {
      ++corrected;
      const double bound = v > prev.upper() ? prev.upper() : prev.lower();
      const auto &u1 = cur.u_star, &u2 = prev.u_star;
      const auto t = oracle::dense_solve(
          {{oracle::pairing(u1, u1), oracle::pairing(u1, u2)},
           {oracle::pairing(u1, u2), oracle::pairing(u2, u2)}},
          {oracle::pairing(u1, x) - cur.upper(), oracle::pairing(u2, x) - bound});
      want = x - t[0] * u1 - t[1] * u2;
      EXPECT_EQ(step.step_class, StepClass::TwoPlaneCorrection);
      EXPECT_NEAR(step.t[0], t[0], 1e-8 * (1 + std::abs(t[0])));
      EXPECT_NEAR(step.t[1], t[1], 1e-8 * (1 + std::abs(t[1])));
      ASSERT_TRUE(step.gamma.has_value());
    }
    EXPECT_LT(oracle::max_abs_diff(step.x_next, want), 1e-8) << "instance " << k;
  }
  EXPECT_GT(corrected, 5);
}

TEST(Run, ExactStartStopsImmediately) {
  const auto t = synth_truth(8);
  const EllipticModel model(t.bvp());
  const auto rep = run({model, t.u}, t.c, SolverConfig{}, t.c);
  EXPECT_EQ(rep.stop_reason, StopReason::Tolerance);
  EXPECT_EQ(rep.n_star, 0);
  ASSERT_EQ(rep.records.size(), 1u);
  EXPECT_EQ(*rep.records[0].rel_error, 0.0);
}

TEST(Run, MaxOuterGivesNotConverged) {
  const auto t = synth_truth(8);
  const EllipticModel model(t.bvp());
  SolverConfig cfg;
  cfg.max_outer = 2;
  const auto rep = run({model, t.u}, t.c0, cfg, t.c);
  EXPECT_EQ(rep.stop_reason, StopReason::NotConverged);
  EXPECT_EQ(rep.n_star, 2);
  EXPECT_EQ(rep.records.size(), 3u);
}

TEST(Run, DiscrepancyPrincipleIsExact) {
  const auto t = synth_truth(12);
  const EllipticModel model(t.bvp());
  const auto y = add_noise(t.u, 2e-3, 5.0, 3);
  for (auto dirs : {SearchDirections::One, SearchDirections::Two}) {
    SolverConfig cfg;
    cfg.delta = 2e-3;
    cfg.directions = dirs;
    const auto rep = run({model, y}, t.c0, cfg, t.c);
    ASSERT_EQ(rep.stop_reason, StopReason::Discrepancy);
    const double bound = cfg.tau * cfg.delta;
    EXPECT_LE(rep.records.back().residual_norm, bound);
    for (std::size_t k = 0; k + 1 < rep.records.size(); ++k)
      EXPECT_GT(rep.records[k].residual_norm, bound);
  }
}

TEST(Run, DeterministicIterates) {
  const auto t = synth_truth(10);
  const EllipticModel model(t.bvp());
  SolverConfig cfg;
  cfg.directions = SearchDirections::Two;
  cfg.max_outer = 8;
  const auto a = run({model, t.u}, t.c0, cfg, t.c);
  const auto b = run({model, t.u}, t.c0, cfg, t.c);
  EXPECT_TRUE(a.final_iterate == b.final_iterate);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].residual_norm, b.records[k].residual_norm);
    EXPECT_EQ(a.records[k].t_params, b.records[k].t_params);
  }
}

TEST(Run, HilbertLinearProblemDescends) {
  std::mt19937_64 rng(9);
  const int n = 3;
  const LinearModel model(random_matrix(n, rng));
  const auto z = oracle::random_grid(n, rng);
  const auto y = LinearState::apply(model.matrix(), z);
  for (auto dirs : {SearchDirections::One, SearchDirections::Two}) {
    auto cfg = hilbert_config();
    cfg.directions = dirs;
    cfg.c_tc = 0.01;
    cfg.max_outer = 50;
    const auto rep = run({model, y}, GridFunction(n), cfg, z);
    ASSERT_NE(rep.stop_reason, StopReason::Failed) << rep.failure_detail;
    for (const auto& c : descent_monitor(rep.records, cfg, rep.c_F)) EXPECT_FALSE(c.violated);
    // Linear exact data: the cone condition holds with constant 0.
    EXPECT_EQ(rep.stripes_containing_truth, rep.stripes_checked);
  }
}

TEST(Run, InvalidInputs) {
  const auto t = synth_truth(4);
  const EllipticModel model(t.bvp());
  auto bad = t.c0;
  bad(2, 2) = std::nan("");
  EXPECT_THROW(run({model, t.u}, bad, SolverConfig{}), DomainError);
  EXPECT_THROW(run({model, t.u}, GridFunction(5), SolverConfig{}), DimensionError);
}

TEST(Run, TCapStopsRun) {
  const auto t = synth_truth(8);
  const EllipticModel model(t.bvp());
  SolverConfig cfg;
  cfg.t_cap = 1e-12;
  const auto rep = run({model, t.u}, t.c0, cfg, t.c);
  EXPECT_EQ(rep.stop_reason, StopReason::Failed);
  EXPECT_FALSE(rep.failure_detail.empty());
}

TEST(DescentMonitor, FlagsIncrease) {
  std::vector<IterationRecord> recs(3);
  recs[0].bregman_to_truth = 1.0;
  recs[1].bregman_to_truth = 0.5;
  recs[2].bregman_to_truth = 0.6;
  for (auto& r : recs) r.residual_norm = 0.1;
  const auto checks = descent_monitor(recs, SolverConfig{}, 1.0);
  ASSERT_EQ(checks.size(), 2u);
  EXPECT_FALSE(checks[0].violated);
  EXPECT_TRUE(checks[1].violated);
  EXPECT_GT(checks[0].predicted_decrement, 0.0);
}

TEST(DescentMonitor, ZeroStepIsNotAViolation) {
  std::vector<IterationRecord> recs(2);
  recs[0].bregman_to_truth = 0.25;
  recs[1].bregman_to_truth = 0.25;
  EXPECT_FALSE(descent_monitor(recs, SolverConfig{}, 1.0)[0].violated);
}
