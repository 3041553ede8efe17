#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>

#include <Eigen/SparseCore>

#include "flashmp/grid.hpp"
#include "flashmp/operators.hpp"

namespace flashmp {

/// Explicit row-compressed form of I + alpha*M (+ alpha*Lambda) on a box.
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SparseOperator(Box box, Matrix matrix);

  [[nodiscard]] const Box& box() const { return box_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  [[nodiscard]] std::size_t nnz() const { return static_cast<std::size_t>(matrix_.nonZeros()); }
  [[nodiscard]] std::size_t max_row_nonzeros() const;
  [[nodiscard]] const Matrix& matrix() const { return matrix_; }

  void apply(std::span<const double> in, std::span<double> out) const;
  [[nodiscard]] FieldVector apply(const FieldVector& e) const;

  /// Matrix Market coordinate format, 1-based indices.
  void write_matrix_market(std::ostream& os) const;

 private:
  Box box_;
  Matrix matrix_;
};

/// One-dimensional difference lifted to the box by Kronecker products
/// (I_z x I_y x D for the x axis, and so on).
[[nodiscard]] SparseOperator::Matrix sparse_difference(const Box& box, Axis axis,
                                                       DifferenceKind kind);

/// Block curl matrix (3V x 3V) assembled from sparse_difference blocks.
[[nodiscard]] SparseOperator::Matrix sparse_curl(const Box& box, DifferenceKind kind);

[[nodiscard]] SparseOperator assemble_sparse(const OperatorParams& params, bool with_boundary);

}  // namespace flashmp
