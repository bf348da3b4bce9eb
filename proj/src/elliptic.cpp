#include "sesop/elliptic.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "sesop/lp_space.hpp"

namespace sesop {

namespace {

constexpr double kLinTol = 1e-12;

Eigen::VectorXd interior_vector(const GridFunction& f) {
  const int n = f.n_interior();
  Eigen::VectorXd v(static_cast<Eigen::Index>(n) * n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) v((i - 1) * n + (j - 1)) = f(i, j);
  return v;
}

void scatter_interior(const Eigen::VectorXd& v, GridFunction& f) {
  const int n = f.n_interior();
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) f(i, j) = v((i - 1) * n + (j - 1));
}

}  // namespace

SparseMatrix assemble(const GridFunction& c) {
  const int n = c.n_interior();
  const double inv_h2 = 1.0 / (c.spacing() * c.spacing());
  const auto dim = static_cast<Eigen::Index>(n) * n;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * dim));
  auto index = [n](int i, int j) { return static_cast<Eigen::Index>((i - 1) * n + (j - 1)); };
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const auto row = index(i, j);
      triplets.emplace_back(row, row, 4.0 * inv_h2 + c(i, j));
      if (i > 1) triplets.emplace_back(row, index(i - 1, j), -inv_h2);
      if (i < n) triplets.emplace_back(row, index(i + 1, j), -inv_h2);
      if (j > 1) triplets.emplace_back(row, index(i, j - 1), -inv_h2);
      if (j < n) triplets.emplace_back(row, index(i, j + 1), -inv_h2);
    }
  }
  SparseMatrix a(dim, dim);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

EllipticState::EllipticState(GridFunction c, const BvpData& data) : c_(std::move(c)) {
  if (!c_.all_finite()) throw DomainError("parameter c contains non-finite values");
  c_.check_shape(data.f);
  c_.check_shape(data.g);

  const SparseMatrix a = assemble(c_);
  auto factor = std::make_shared<Factorization>(a);
  if (factor->info() != Eigen::Success) {
    const double cmin = c_.values().minCoeff();
    std::ostringstream msg;
    msg << "L(c) is not positive definite (Cholesky failed); min c = " << cmin;
    throw LinearSolveError(msg.str());
  }
  factor_ = std::move(factor);

  // Right-hand side: f at interior nodes plus eliminated Dirichlet neighbours.
  const int n = c_.n_interior();
  const double inv_h2 = 1.0 / (c_.spacing() * c_.spacing());
  Eigen::VectorXd rhs = interior_vector(data.f);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      double b = 0.0;
      if (i == 1) b += data.g(0, j);
      if (i == n) b += data.g(n + 1, j);
      if (j == 1) b += data.g(i, 0);
      if (j == n) b += data.g(i, n + 1);
      rhs((i - 1) * n + (j - 1)) += inv_h2 * b;
    }
  }

  Eigen::VectorXd sol = factor_->solve(rhs);
  const double rhs_norm = std::max(rhs.norm(), 1e-300);
  Eigen::VectorXd res = rhs - a * sol;
  if (res.norm() > kLinTol * rhs_norm) {
    sol += factor_->solve(res);
    res = rhs - a * sol;
  }
  if (!sol.allFinite() || res.norm() > 1e3 * kLinTol * rhs_norm) {
    std::ostringstream msg;
    msg << "forward solve residual " << res.norm() / rhs_norm << " exceeds tolerance";
    throw LinearSolveError(msg.str());
  }

  u_ = GridFunction(n);
  for (int k = 0; k < n + 2; ++k) {
    u_(0, k) = data.g(0, k);
    u_(n + 1, k) = data.g(n + 1, k);
    u_(k, 0) = data.g(k, 0);
    u_(k, n + 1) = data.g(k, n + 1);
  }
  scatter_interior(sol, u_);
}

GridFunction EllipticState::solve_homogeneous(const GridFunction& rhs) const {
  c_.check_shape(rhs);
  GridFunction out(c_.n_interior());
  scatter_interior(factor_->solve(interior_vector(rhs)), out);
  return out;
}

GridFunction EllipticState::derivative(const GridFunction& h) const {
  return -solve_homogeneous(hadamard(h, u_));
}

GridFunction EllipticState::adjoint(const GridFunction& w) const {
  return -hadamard(u_, solve_homogeneous(w));
}

GridFunction solve_forward(const GridFunction& c, const BvpData& data) {
  return EllipticState(c, data).value();
}

double operator_norm_estimate(const Linearization& lin, int iterations,
                              unsigned long long seed) {
  const GridFunction& x = lin.parameter();
  const SpaceSpec l2 = SpaceSpec::on_grid(2.0, 2.0, x.n_interior());

  std::mt19937_64 rng(seed);
  GridFunction v(x.n_interior());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    v.values()(k) = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  double nv = weighted_norm(v, l2);
  v *= 1.0 / nv;

  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    GridFunction w = lin.adjoint(lin.derivative(v));
    const double nw = weighted_norm(w, l2);
    if (nw == 0.0) return 0.0;
    estimate = std::sqrt(nw);
    v = (1.0 / nw) * std::move(w);
  }
  return estimate;
}

}  // namespace sesop
