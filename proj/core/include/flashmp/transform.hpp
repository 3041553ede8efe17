#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "flashmp/counters.hpp"
#include "flashmp/grid.hpp"

namespace flashmp {

/// D^f = U * diag(S) * Vt for the n-point forward difference. Singular values
/// are descending; the gauge is fixed so that the first nonzero entry of every
/// right singular vector (column of V) is positive.
struct AxisSvd {
  int n = 0;
  Eigen::MatrixXd U;
  Eigen::VectorXd S;
  Eigen::MatrixXd Vt;
};

[[nodiscard]] AxisSvd svd_of_difference(int n);

/// Process-wide cache keyed by n; thread-safe.
[[nodiscard]] std::shared_ptr<const AxisSvd> cached_svd_of_difference(int n);

/// Per-axis factors for a box. Factors are shared between boxes with equal extents.
class TransformSet {
 public:
  TransformSet() = default;
  TransformSet(Box box, std::shared_ptr<const AxisSvd> x, std::shared_ptr<const AxisSvd> y,
               std::shared_ptr<const AxisSvd> z);

  [[nodiscard]] static TransformSet for_box(const Box& box);

  [[nodiscard]] const Box& box() const { return box_; }
  [[nodiscard]] const AxisSvd& axis(Axis a) const;

 private:
  Box box_;
  std::shared_ptr<const AxisSvd> x_;
  std::shared_ptr<const AxisSvd> y_;
  std::shared_ptr<const AxisSvd> z_;
};

/// Scratch for contractions; one per concurrent caller.
struct TransformWorkspace {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> ping;
  std::vector<double> pong;
  void reserve(std::size_t volume);
};

/// out(.., i_axis, ..) = sum_m T(i_axis, m) * F(.., m, ..), done as a single GEMM
/// with M = n_axis, K = n_axis, N = volume / n_axis.
void contract_axis(Axis axis, const Eigen::Ref<const Eigen::MatrixXd>& t, const Box& box,
                   std::span<const double> in, std::span<double> out, TransformWorkspace& ws,
                   OpCounter* counter = nullptr);
[[nodiscard]] std::vector<double> contract_axis(Axis axis,
                                                const Eigen::Ref<const Eigen::MatrixXd>& t,
                                                const Box& box, std::span<const double> in);

/// Direct summation with the same semantics; reference for tests and benchmarks.
[[nodiscard]] std::vector<double> contract_axis_naive(Axis axis, const Eigen::MatrixXd& t,
                                                      const Box& box, std::span<const double> in);

/// Component c is contracted with U^T along axis c and V^T along the other two.
void apply_G(const TransformSet& ts, std::span<const double> in, std::span<double> out,
             TransformWorkspace& ws, OpCounter* counter = nullptr);
/// Transposed contractions (U and V in place of U^T and V^T).
void apply_G_inverse(const TransformSet& ts, std::span<const double> in, std::span<double> out,
                     TransformWorkspace& ws, OpCounter* counter = nullptr);

[[nodiscard]] FieldVector apply_G(const TransformSet& ts, const FieldVector& e);
[[nodiscard]] FieldVector apply_G_inverse(const TransformSet& ts, const FieldVector& e);

}  // namespace flashmp
