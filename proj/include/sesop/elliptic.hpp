#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>

#include "sesop/forward_model.hpp"
#include "sesop/grid_function.hpp"

namespace sesop {

/// Data of -Laplace(u) + c u = f on the unit square with u = g on the boundary.
struct BvpData {
  GridFunction f;
  /// Only the boundary nodes are read.
  GridFunction g;

  int n_interior() const { return f.n_interior(); }
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Five-point discretization of L(c) = -Laplace + c over the N^2 interior
/// nodes, interior node (i, j) mapped to row (i-1)*N + (j-1).
SparseMatrix assemble(const GridFunction& c);

/// Cached F(c) with the Cholesky factorization of L(c) reused by the
/// derivative and adjoint. Immutable after construction.
class EllipticState final : public Linearization {
 public:
  EllipticState(GridFunction c, const BvpData& data);

  const GridFunction& parameter() const override { return c_; }
  const GridFunction& value() const override { return u_; }

  /// F'(c) h = -L(c)^{-1}(h u), homogeneous boundary.
  GridFunction derivative(const GridFunction& h) const override;
  /// F'(c)* w = -u L(c)^{-1} w, homogeneous boundary.
  GridFunction adjoint(const GridFunction& w) const override;

  /// L(c)^{-1} applied to the interior of `rhs`; boundary of the result is 0.
  GridFunction solve_homogeneous(const GridFunction& rhs) const;

 private:
  using Factorization = Eigen::SimplicialLLT<SparseMatrix>;

  GridFunction c_;
  GridFunction u_;
  std::shared_ptr<const Factorization> factor_;
};

/// F(c) = u: solution of the boundary value problem.
GridFunction solve_forward(const GridFunction& c, const BvpData& data);

class EllipticModel final : public ForwardModel {
 public:
  explicit EllipticModel(BvpData data) : data_(std::move(data)) {}

  std::shared_ptr<const Linearization> linearize(const GridFunction& x) const override {
    return std::make_shared<EllipticState>(x, data_);
  }

  const BvpData& data() const { return data_; }

 private:
  BvpData data_;
};

}  // namespace sesop
