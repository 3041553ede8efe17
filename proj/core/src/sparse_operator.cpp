#include "flashmp/sparse_operator.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <vector>

#include "flashmp/errors.hpp"

namespace flashmp {
namespace {

using Triplet = Eigen::Triplet<double>;
using Matrix = SparseOperator::Matrix;

Matrix sparse_1d(int n, DifferenceKind kind) {
  std::vector<Triplet> t;
  for (int r = 0; r < n; ++r) {
    if (kind == DifferenceKind::forward) {
      t.emplace_back(r, r, -1.0);
      if (r + 1 < n) t.emplace_back(r, r + 1, 1.0);
    } else {
      t.emplace_back(r, r, 1.0);
      if (r > 0) t.emplace_back(r, r - 1, -1.0);
    }
  }
  Matrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Matrix identity(int n) {
  Matrix m(n, n);
  m.setIdentity();
  return m;
}

// Kronecker product a (x) b: the index of b varies fastest.
Matrix kron(const Matrix& a, const Matrix& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ra = 0; ra < a.outerSize(); ++ra)
    for (Matrix::InnerIterator ia(a, ra); ia; ++ia)
      for (int rb = 0; rb < b.outerSize(); ++rb)
        for (Matrix::InnerIterator ib(b, rb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
  Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void add_block(std::vector<Triplet>& t, const Matrix& block, Eigen::Index row0, Eigen::Index col0,
               double scale) {
  for (int r = 0; r < block.outerSize(); ++r)
    for (Matrix::InnerIterator it(block, r); it; ++it)
      t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

}  // namespace

SparseOperator::SparseOperator(Box box, Matrix matrix) : box_(box), matrix_(std::move(matrix)) {
  if (static_cast<std::size_t>(matrix_.rows()) != box_.dof() || matrix_.rows() != matrix_.cols()) {
    throw DimensionError("sparse operator shape does not match box");
  }
  matrix_.makeCompressed();
}

std::size_t SparseOperator::max_row_nonzeros() const {
  std::size_t best = 0;
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    best = std::max<std::size_t>(best, static_cast<std::size_t>(matrix_.outerIndexPtr()[r + 1] -
                                                                matrix_.outerIndexPtr()[r]));
  }
  return best;
}

void SparseOperator::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim()) throw DimensionError("SpMV length mismatch");
  const auto* outer = matrix_.outerIndexPtr();
  const auto* inner = matrix_.innerIndexPtr();
  const auto* vals = matrix_.valuePtr();
  for (Eigen::Index r = 0; r < matrix_.rows(); ++r) {
    double acc = 0.0;
    for (auto p = outer[r]; p < outer[r + 1]; ++p) acc += vals[p] * in[inner[p]];
    out[r] = acc;
  }
}

FieldVector SparseOperator::apply(const FieldVector& e) const {
  FieldVector out(box_);
  apply(e.data(), out.data());
  return out;
}

void SparseOperator::write_matrix_market(std::ostream& os) const {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << "% box " << box_.nx << ' ' << box_.ny << ' ' << box_.nz << '\n';
  os << matrix_.rows() << ' ' << matrix_.cols() << ' ' << matrix_.nonZeros() << '\n';
  os << std::setprecision(17);
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r)
    for (Matrix::InnerIterator it(matrix_, r); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

Matrix sparse_difference(const Box& box, Axis axis, DifferenceKind kind) {
  const Matrix ix = identity(box.nx);
  const Matrix iy = identity(box.ny);
  const Matrix iz = identity(box.nz);
  switch (axis) {
    case Axis::x:
      return kron(iz, kron(iy, sparse_1d(box.nx, kind)));
    case Axis::y:
      return kron(iz, kron(sparse_1d(box.ny, kind), ix));
    case Axis::z:
      return kron(sparse_1d(box.nz, kind), kron(iy, ix));
  }
  return {};
}

Matrix sparse_curl(const Box& box, DifferenceKind kind) {
  const auto v = static_cast<Eigen::Index>(box.volume());
  const Matrix dx = sparse_difference(box, Axis::x, kind);
  const Matrix dy = sparse_difference(box, Axis::y, kind);
  const Matrix dz = sparse_difference(box, Axis::z, kind);
  std::vector<Triplet> t;
  add_block(t, dz, 0, v, -1.0);
  add_block(t, dy, 0, 2 * v, 1.0);
  add_block(t, dz, v, 0, 1.0);
  add_block(t, dx, v, 2 * v, -1.0);
  add_block(t, dy, 2 * v, 0, -1.0);
  add_block(t, dx, 2 * v, v, 1.0);
  Matrix c(3 * v, 3 * v);
  c.setFromTriplets(t.begin(), t.end());
  return c;
}

SparseOperator assemble_sparse(const OperatorParams& params, bool with_boundary) {
  const Box& box = params.box;
  const auto dof = static_cast<Eigen::Index>(box.dof());
  Matrix m = sparse_curl(box, DifferenceKind::backward) * sparse_curl(box, DifferenceKind::forward);
  m.prune(0.0);
  Matrix a = identity(static_cast<int>(dof)) + params.alpha * m;
  if (with_boundary) {
    const auto diag = boundary_diagonal(box, params.corrected_faces);
    std::vector<Triplet> t;
    for (Eigen::Index p = 0; p < dof; ++p)
      if (diag[p] != 0.0) t.emplace_back(p, p, params.alpha * diag[p]);
    Matrix lambda(dof, dof);
    lambda.setFromTriplets(t.begin(), t.end());
    a += lambda;
  }
  a.prune(0.0);
  return SparseOperator(box, std::move(a));
}

}  // namespace flashmp
