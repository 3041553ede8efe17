#pragma once

// Dense reference constructions used only by tests. Everything here is built
// from first principles (explicit difference matrices and Kronecker products),
// independent of the matrix-free and transform code paths under test.

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "flashmp/grid.hpp"

namespace flashmp::oracle {

inline Eigen::MatrixXd forward_1d(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    d(r, r) = -1.0;
    if (r + 1 < n) d(r, r + 1) = 1.0;
  }
  return d;
}

inline Eigen::MatrixXd backward_1d(int n) { return -forward_1d(n).transpose(); }

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

/// Lift per-axis n x n matrices to the box (x index fastest).
inline Eigen::MatrixXd lift(const Box& box, const Eigen::MatrixXd& tx, const Eigen::MatrixXd& ty,
                            const Eigen::MatrixXd& tz) {
  return kron(tz, kron(ty, tx));
}

inline Eigen::MatrixXd difference(const Box& box, Axis axis, bool forward) {
  auto ix = Eigen::MatrixXd::Identity(box.nx, box.nx);
  auto iy = Eigen::MatrixXd::Identity(box.ny, box.ny);
  auto iz = Eigen::MatrixXd::Identity(box.nz, box.nz);
  auto d = [&](int n) { return forward ? forward_1d(n) : backward_1d(n); };
  switch (axis) {
    case Axis::x:
      return lift(box, d(box.nx), iy, iz);
    case Axis::y:
      return lift(box, ix, d(box.ny), iz);
    case Axis::z:
      return lift(box, ix, iy, d(box.nz));
  }
  return {};
}

inline Eigen::MatrixXd curl(const Box& box, bool forward) {
  const Eigen::Index v = static_cast<Eigen::Index>(box.volume());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3 * v, 3 * v);
  const auto dx = difference(box, Axis::x, forward);
  const auto dy = difference(box, Axis::y, forward);
  const auto dz = difference(box, Axis::z, forward);
  c.block(0, v, v, v) = -dz;
  c.block(0, 2 * v, v, v) = dy;
  c.block(v, 0, v, v) = dz;
  c.block(v, 2 * v, v, v) = -dx;
  c.block(2 * v, 0, v, v) = -dy;
  c.block(2 * v, v, v, v) = dx;
  return c;
}

inline Eigen::MatrixXd double_curl(const Box& box) { return curl(box, false) * curl(box, true); }

/// Lambda from the low-face rule, all faces corrected.
inline Eigen::VectorXd lambda_diagonal(const Box& box, bool fx = true, bool fy = true,
                                       bool fz = true) {
  const Eigen::Index v = static_cast<Eigen::Index>(box.volume());
  Eigen::VectorXd d = Eigen::VectorXd::Zero(3 * v);
  for (int k = 0; k < box.nz; ++k)
    for (int j = 0; j < box.ny; ++j)
      for (int i = 0; i < box.nx; ++i) {
        const auto p = static_cast<Eigen::Index>(box.point(i, j, k));
        d(p) = (j == 0 && fy) + (k == 0 && fz);
        d(v + p) = (i == 0 && fx) + (k == 0 && fz);
        d(2 * v + p) = (i == 0 && fx) + (j == 0 && fy);
      }
  return d;
}

inline Eigen::MatrixXd operator_matrix(const Box& box, double alpha, bool with_boundary) {
  const Eigen::Index n = static_cast<Eigen::Index>(box.dof());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + alpha * double_curl(box);
  if (with_boundary) a.diagonal() += alpha * lambda_diagonal(box);
  return a;
}

/// P: component-major -> grid-major.
inline Eigen::MatrixXd permutation(const Box& box) {
  const Eigen::Index v = static_cast<Eigen::Index>(box.volume());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3 * v, 3 * v);
  for (Eigen::Index q = 0; q < v; ++q)
    for (int c = 0; c < 3; ++c) p(3 * q + c, c * v + q) = 1.0;
  return p;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  const double denom = want.norm();
  return denom == 0.0 ? got.norm() : (got - want).norm() / denom;
}

inline double rel_err(std::span<const double> got, std::span<const double> want) {
  return rel_err(to_eigen(got), to_eigen(want));
}

}  // namespace flashmp::oracle
