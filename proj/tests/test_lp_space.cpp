#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sesop/lp_space.hpp"

using namespace sesop;

TEST(ConjugateExponent, Values) {
  EXPECT_DOUBLE_EQ(conjugate_exponent(2.0), 2.0);
  EXPECT_DOUBLE_EQ(conjugate_exponent(1.5), 3.0);
  EXPECT_DOUBLE_EQ(conjugate_exponent(5.0), 1.25);
  EXPECT_THROW(conjugate_exponent(1.0), DomainError);
  EXPECT_THROW(conjugate_exponent(0.5), DomainError);
}

TEST(SpaceSpec, RejectsBadExponents) {
  EXPECT_THROW(SpaceSpec(1.0, 2.0, 0.1), DomainError);
  EXPECT_THROW(SpaceSpec(2.0, 1.0, 0.1), DomainError);
  EXPECT_THROW(SpaceSpec(2.0, 2.0, 0.0), DomainError);
  EXPECT_THROW(SpaceSpec(std::nan(""), 2.0, 0.1), DomainError);
}

TEST(SpaceSpec, DualSwapsExponents) {
  const SpaceSpec x(1.5, 2.0, 0.1);
  const SpaceSpec d = x.dual();
  EXPECT_DOUBLE_EQ(d.norm_exponent(), 3.0);
  EXPECT_DOUBLE_EQ(d.gauge_exponent(), 2.0);
  EXPECT_DOUBLE_EQ(d.h(), 0.1);
}

TEST(WeightedNorm, ConstantFunction) {
  // (N+2)^2 nodes of value 1 with h = 1/(N+1).
  const int n = 3;
  const auto one = GridFunction::constant(n, 1.0);
  const double h = 0.25;
  for (double r : {1.5, 2.0, 5.0}) {
    const auto sp = SpaceSpec::on_grid(r, 2.0, n);
    EXPECT_NEAR(weighted_norm(one, sp), std::pow(h, 2.0 / r) * std::pow(25.0, 1.0 / r), 1e-14);
  }
}

TEST(WeightedNorm, ZeroAndMismatch) {
  const auto sp = SpaceSpec::on_grid(1.5, 2.0, 4);
  EXPECT_EQ(weighted_norm(GridFunction(4), sp), 0.0);
  EXPECT_THROW(weighted_norm(GridFunction(5), sp), DimensionError);
}

TEST(WeightedNorm, MatchesLoopOracle) {
  std::mt19937_64 rng(7);
  for (double r : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    const auto f = oracle::random_grid(6, rng);
    EXPECT_LT(oracle::rel_diff(weighted_norm(f, SpaceSpec::on_grid(r, 2.0, 6)), oracle::norm(f, r)),
              1e-13);
  }
}

TEST(WeightedNorm, SurvivesLargeAndTinyValues) {
  const auto sp = SpaceSpec::on_grid(5.0, 2.0, 3);
  const auto big = GridFunction::constant(3, 1e80);
  const auto tiny = GridFunction::constant(3, 1e-80);
  EXPECT_TRUE(std::isfinite(weighted_norm(big, sp)));
  EXPECT_GT(weighted_norm(tiny, sp), 0.0);
  EXPECT_NEAR(weighted_norm(big, sp) / weighted_norm(tiny, sp), 1e160, 1e146);
}

TEST(DualPairing, Value) {
  const int n = 1;
  auto g = GridFunction::constant(n, 2.0);
  auto f = GridFunction::constant(n, 3.0);
  // 9 nodes, h = 1/2.
  EXPECT_DOUBLE_EQ(dual_pairing(g, f, SpaceSpec::on_grid(2.0, 2.0, n)), 0.25 * 9 * 6);
}

TEST(DualityMap, ZeroMapsToZero) {
  const auto sp = SpaceSpec::on_grid(1.5, 2.0, 4);
  EXPECT_TRUE(duality_map(GridFunction(4), sp).is_zero());
  EXPECT_TRUE(inverse_duality_map(GridFunction(4), sp).is_zero());
}

TEST(DualityMap, HilbertIsIdentity) {
  std::mt19937_64 rng(3);
  const auto f = oracle::random_grid(5, rng);
  const auto sp = SpaceSpec::on_grid(2.0, 2.0, 5);
  EXPECT_LT(oracle::max_abs_diff(duality_map(f, sp), f), 1e-15);
  EXPECT_LT(oracle::max_abs_diff(inverse_duality_map(f, sp), f), 1e-15);
}

TEST(DualityMap, MatchesLoopOracle) {
  std::mt19937_64 rng(11);
  for (auto [r, q] : {std::pair{1.5, 2.0}, {5.0, 2.0}, {3.0, 3.0}, {1.5, 1.5}}) {
    const auto f = oracle::random_grid(4, rng);
    const auto got = duality_map(f, SpaceSpec::on_grid(r, q, 4));
    const auto want = oracle::jmap(f, r, q);
    EXPECT_LT(oracle::max_abs_diff(got, want), 1e-13 * oracle::max_abs(want));
  }
}

TEST(WeightedNorm, HandValues) {
  const auto sp = SpaceSpec::on_grid(2.0, 2.0, 1);
  EXPECT_DOUBLE_EQ(weighted_norm(GridFunction::constant(1, 1.0), sp), 1.5);
  for (double r : {1.5, 2.0, 5.0}) {
    GridFunction f(4);
    f(2, 3) = -7.0;
    EXPECT_NEAR(weighted_norm(f, SpaceSpec::on_grid(r, 2.0, 4)), std::pow(0.2, 2.0 / r) * 7.0,
                1e-14);
  }
}

TEST(DualPairing, HandValueAndMismatch) {
  const auto one = GridFunction::constant(1, 1.0);
  const auto sp = SpaceSpec::on_grid(2.0, 2.0, 1);
  EXPECT_DOUBLE_EQ(dual_pairing(one, one, sp), 2.25);
  EXPECT_EQ(dual_pairing(GridFunction(1), one, sp), 0.0);
  EXPECT_THROW(dual_pairing(GridFunction(2), one, sp), DimensionError);
}

// Invariants over random inputs.

struct Exponents {
  double r, q;
};

class DualityIdentities : public ::testing::TestWithParam<Exponents> {};

TEST_P(DualityIdentities, PairingNormAndRoundTrip) {
  const auto [r, q] = GetParam();
  std::mt19937_64 rng(static_cast<std::uint64_t>(100 * r + q));
  std::uniform_int_distribution<int> nd(1, 8);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const int n = nd(rng);
    const auto f = std::pow(10.0, scale(rng)) * oracle::random_grid(n, rng);
    const auto sp = SpaceSpec::on_grid(r, q, n);
    const auto j = duality_map(f, sp);
    const double nf = weighted_norm(f, sp);
    EXPECT_LT(oracle::rel_diff(dual_pairing(j, f, sp), std::pow(nf, q)), 1e-10);
    EXPECT_LT(oracle::rel_diff(weighted_norm(j, sp.dual()), std::pow(nf, q - 1.0)), 1e-10);
    const auto back = inverse_duality_map(j, sp);
    EXPECT_LT(oracle::max_abs_diff(back, f), 1e-10 * oracle::max_abs(f));
  }
}

INSTANTIATE_TEST_SUITE_P(Exponents, DualityIdentities,
                         ::testing::Values(Exponents{1.5, 2.0}, Exponents{2.0, 2.0},
                                           Exponents{5.0, 2.0}, Exponents{3.0, 3.0},
                                           Exponents{1.2, 4.0}));

TEST(DualityMap, IsMonotone) {
  std::mt19937_64 rng(21);
  for (double r : {1.5, 3.0}) {
    const auto sp = SpaceSpec::on_grid(r, 2.0, 5);
    for (int k = 0; k < 50; ++k) {
      const auto a = oracle::random_grid(5, rng);
      const auto b = oracle::random_grid(5, rng);
      EXPECT_GE(dual_pairing(duality_map(a, sp) - duality_map(b, sp), a - b, sp), -1e-14);
    }
  }
}

TEST(WeightedNorm, AbsolutelyHomogeneous) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(-50.0, 50.0);
  for (double r : {1.5, 2.0, 5.0}) {
    const auto sp = SpaceSpec::on_grid(r, 2.0, 6);
    for (int k = 0; k < 20; ++k) {
      const auto f = oracle::random_grid(6, rng);
      const double l = lam(rng);
      EXPECT_LT(oracle::rel_diff(weighted_norm(l * f, sp), std::abs(l) * weighted_norm(f, sp)),
                1e-14);
    }
  }
}

TEST(BregmanDistance, SelfDistanceIsZero) {
  std::mt19937_64 rng(1);
  const auto x = oracle::random_grid(5, rng);
  for (auto [r, q] : {std::pair{1.5, 2.0}, {5.0, 2.0}, {3.0, 3.0}})
    EXPECT_EQ(bregman_distance(x, x, SpaceSpec::on_grid(r, q, 5)), 0.0);
}

TEST(BregmanDistance, HilbertIsHalfSquaredDistance) {
  std::mt19937_64 rng(2);
  const auto sp = SpaceSpec::on_grid(2.0, 2.0, 5);
  for (int k = 0; k < 20; ++k) {
    const auto x = oracle::random_grid(5, rng);
    const auto y = oracle::random_grid(5, rng);
    const double d = oracle::norm(x - y, 2.0);
    EXPECT_LT(oracle::rel_diff(bregman_distance(x, y, sp), 0.5 * d * d), 1e-12);
  }
}

TEST(BregmanDistance, FormsAgree) {
  std::mt19937_64 rng(9);
  for (auto [r, q] : {std::pair{1.5, 2.0}, {1.5, 1.5}, {5.0, 2.0}, {3.0, 3.0}}) {
    const auto sp = SpaceSpec::on_grid(r, q, 4);
    for (int k = 0; k < 30; ++k) {
      const auto x = oracle::random_grid(4, rng);
      const auto y = oracle::random_grid(4, rng);
      const double d2 = bregman_distance(x, y, sp);
      const double scale = std::pow(oracle::norm(x, r), q) + std::pow(oracle::norm(y, r), q);
      EXPECT_NEAR(d2, oracle::breg1(x, y, r, q), 1e-10 * scale);
      EXPECT_NEAR(d2, oracle::breg3(x, y, r, q), 1e-10 * scale);
      EXPECT_GT(d2, 0.0);
    }
  }
}

TEST(BregmanDistance, ZeroArguments) {
  std::mt19937_64 rng(4);
  const auto x = oracle::random_grid(3, rng);
  const auto sp = SpaceSpec::on_grid(1.5, 2.0, 3);
  const double nx = weighted_norm(x, sp);
  // D(0, x) = ||x||^q / q and D(x, 0) = ||x||^q / q*.
  EXPECT_NEAR(bregman_distance(GridFunction(3), x, sp), 0.5 * nx * nx, 1e-14);
  EXPECT_NEAR(bregman_distance(x, GridFunction(3), sp), 0.5 * nx * nx, 1e-14);
}
