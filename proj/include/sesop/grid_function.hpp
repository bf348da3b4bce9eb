#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "sesop/errors.hpp"

namespace sesop {

/// Nodal values on the uniform (N+2)x(N+2) grid over the unit square.
///
/// Node (i, j) sits at the point (i*h, j*h) with h = 1/(N+1); rows run along
/// x and columns along y. Boundary nodes are rows/columns 0 and N+1. The same
/// container carries primal iterates, residuals and dual vectors; which space
/// a value lives in is decided by the SpaceSpec it is paired with.
class GridFunction {
 public:
  using Array = Eigen::ArrayXXd;

  GridFunction() = default;

  /// Zero function with N interior nodes per direction.
  explicit GridFunction(int n_interior) : n_interior_(n_interior) {
    if (n_interior < 1) {
      throw DimensionError("GridFunction needs at least one interior node, got N=" +
                           std::to_string(n_interior));
    }
    values_ = Array::Zero(n_interior + 2, n_interior + 2);
  }

  explicit GridFunction(Array values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols() || values_.rows() < 3) {
      throw DimensionError("GridFunction must be square with side >= 3, got " +
                           std::to_string(values_.rows()) + "x" +
                           std::to_string(values_.cols()));
    }
    n_interior_ = static_cast<int>(values_.rows()) - 2;
  }

  /// Samples `fn(x, y)` at every node.
  template <class Fn>
  static GridFunction sample(int n_interior, Fn&& fn) {
    GridFunction g(n_interior);
    const double h = g.spacing();
    for (Eigen::Index i = 0; i < g.values_.rows(); ++i)
      for (Eigen::Index j = 0; j < g.values_.cols(); ++j)
        g.values_(i, j) = fn(static_cast<double>(i) * h, static_cast<double>(j) * h);
    return g;
  }

  static GridFunction constant(int n_interior, double value) {
    GridFunction g(n_interior);
    g.values_.setConstant(value);
    return g;
  }

  int n_interior() const { return n_interior_; }
  int side() const { return n_interior_ + 2; }
  double spacing() const { return 1.0 / (n_interior_ + 1); }
  Eigen::Index size() const { return values_.size(); }

  const Array& values() const { return values_; }
  Array& values() { return values_; }

  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  double& operator()(Eigen::Index i, Eigen::Index j) { return values_(i, j); }

  bool is_boundary(Eigen::Index i, Eigen::Index j) const {
    return i == 0 || j == 0 || i == n_interior_ + 1 || j == n_interior_ + 1;
  }

  bool all_finite() const { return values_.isFinite().all(); }
  bool is_zero() const { return (values_ == 0.0).all(); }
  bool same_shape(const GridFunction& other) const { return n_interior_ == other.n_interior_; }

  GridFunction& operator+=(const GridFunction& o) {
    check_shape(o);
    values_ += o.values_;
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    check_shape(o);
    values_ -= o.values_;
    return *this;
  }
  GridFunction& operator*=(double a) {
    values_ *= a;
    return *this;
  }

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(double s, GridFunction a) { return a *= s; }
  friend GridFunction operator*(GridFunction a, double s) { return a *= s; }
  friend GridFunction operator-(GridFunction a) { return a *= -1.0; }

  /// Pointwise product.
  friend GridFunction hadamard(const GridFunction& a, const GridFunction& b) {
    a.check_shape(b);
    return GridFunction(Array(a.values_ * b.values_));
  }

  friend bool operator==(const GridFunction& a, const GridFunction& b) {
    return a.n_interior_ == b.n_interior_ && (a.values_ == b.values_).all();
  }

  void check_shape(const GridFunction& other) const {
    if (!same_shape(other)) {
      throw DimensionError("grid shape mismatch: N=" + std::to_string(n_interior_) +
                           " vs N=" + std::to_string(other.n_interior_));
    }
  }

 private:
  Array values_;
  int n_interior_ = 0;
};

}  // namespace sesop
