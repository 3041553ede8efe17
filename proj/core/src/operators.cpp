#include "flashmp/operators.hpp"

#include <string>

#include "flashmp/errors.hpp"

namespace flashmp {

Eigen::MatrixXd DifferenceMatrix::dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    d(r, r) = -1.0;
    if (r + 1 < n) d(r, r + 1) = 1.0;
  }
  if (kind == DifferenceKind::backward) return -d.transpose();
  return d;
}

void DifferenceMatrix::apply(std::span<const double> in, std::span<double> out) const {
  if (static_cast<int>(in.size()) != n || static_cast<int>(out.size()) != n) {
    throw DimensionError("difference apply: length mismatch");
  }
  if (kind == DifferenceKind::forward) {
    for (int r = 0; r < n; ++r) out[r] = (r + 1 < n ? in[r + 1] : 0.0) - in[r];
  } else {
    for (int r = 0; r < n; ++r) out[r] = in[r] - (r > 0 ? in[r - 1] : 0.0);
  }
}

DifferenceMatrix build_forward_difference(int n) {
  if (n < 1) throw DimensionError("difference matrix size must be >= 1");
  return {n, DifferenceKind::forward};
}

DifferenceMatrix build_backward_difference(int n) {
  if (n < 1) throw DimensionError("difference matrix size must be >= 1");
  return {n, DifferenceKind::backward};
}

void accumulate_difference(DifferenceKind kind, Axis axis, const Box& box, double scale,
                           std::span<const double> in, std::span<double> out) {
  const std::size_t nx = box.nx;
  const std::size_t ny = box.ny;
  const std::size_t nz = box.nz;
  const std::size_t stride = axis == Axis::x ? 1 : (axis == Axis::y ? nx : nx * ny);
  const int n = box.extent(axis);
  const bool fwd = kind == DifferenceKind::forward;
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t row = (k * ny + j) * nx;
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t p = row + i;
        const int idx = static_cast<int>(axis == Axis::x ? i : (axis == Axis::y ? j : k));
        double d;
        if (fwd) {
          d = (idx + 1 < n ? in[p + stride] : 0.0) - in[p];
        } else {
          d = in[p] - (idx > 0 ? in[p - stride] : 0.0);
        }
        out[p] += scale * d;
      }
    }
  }
}

void apply_curl(DifferenceKind kind, const Box& box, std::span<const double> in,
                std::span<double> out) {
  const std::size_t v = box.volume();
  auto ex = in.subspan(0, v);
  auto ey = in.subspan(v, v);
  auto ez = in.subspan(2 * v, v);
  auto ox = out.subspan(0, v);
  auto oy = out.subspan(v, v);
  auto oz = out.subspan(2 * v, v);
  std::fill(out.begin(), out.end(), 0.0);
  accumulate_difference(kind, Axis::z, box, -1.0, ey, ox);
  accumulate_difference(kind, Axis::y, box, 1.0, ez, ox);
  accumulate_difference(kind, Axis::z, box, 1.0, ex, oy);
  accumulate_difference(kind, Axis::x, box, -1.0, ez, oy);
  accumulate_difference(kind, Axis::y, box, -1.0, ex, oz);
  accumulate_difference(kind, Axis::x, box, 1.0, ey, oz);
}

FieldVector apply_curl(DifferenceKind kind, const FieldVector& e) {
  FieldVector out(e.box());
  apply_curl(kind, e.box(), e.data(), out.data());
  return out;
}

FieldVector apply_double_curl(const FieldVector& e) {
  return apply_curl(DifferenceKind::backward, apply_curl(DifferenceKind::forward, e));
}

int delta_boundary(const Box& box, Axis l, int i, int j, int k, FaceMask faces) {
  if (i < 1 || i > box.nx || j < 1 || j > box.ny || k < 1 || k > box.nz) {
    throw DimensionError("delta_boundary: index (" + std::to_string(i) + "," + std::to_string(j) +
                         "," + std::to_string(k) + ") outside box");
  }
  bool p_low = false;
  bool q_low = false;
  switch (l) {
    case Axis::x:
      p_low = j == 1 && faces.y;
      q_low = k == 1 && faces.z;
      break;
    case Axis::y:
      p_low = i == 1 && faces.x;
      q_low = k == 1 && faces.z;
      break;
    case Axis::z:
      p_low = i == 1 && faces.x;
      q_low = j == 1 && faces.y;
      break;
  }
  return static_cast<int>(p_low) + static_cast<int>(q_low);
}

OperatorParams::OperatorParams(Box b, double a, FaceMask f) : box(b), alpha(a), corrected_faces(f) {
  if (!(alpha >= 0.0)) throw DimensionError("alpha must be non-negative");
}

std::vector<double> boundary_diagonal(const Box& box, FaceMask faces) {
  std::vector<double> diag(box.dof(), 0.0);
  const std::size_t v = box.volume();
  for (Axis l : kAxes) {
    const std::size_t base = static_cast<std::size_t>(l) * v;
    for (int k = 1; k <= box.nz; ++k)
      for (int j = 1; j <= box.ny; ++j)
        for (int i = 1; i <= box.nx; ++i)
          diag[base + box.point(i - 1, j - 1, k - 1)] = delta_boundary(box, l, i, j, k, faces);
  }
  return diag;
}

void apply_A(const OperatorParams& params, bool with_boundary, std::span<const double> in,
             std::span<double> out) {
  const Box& box = params.box;
  if (in.size() != box.dof() || out.size() != box.dof()) {
    throw DimensionError("apply_A: vector length does not match the operator box");
  }
  std::vector<double> curl(box.dof());
  apply_curl(DifferenceKind::forward, box, in, curl);
  apply_curl(DifferenceKind::backward, box, curl, out);
  const double a = params.alpha;
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = in[p] + a * out[p];
  if (with_boundary && a != 0.0) {
    const auto diag = boundary_diagonal(box, params.corrected_faces);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += a * diag[p] * in[p];
  }
}

FieldVector apply_A(const OperatorParams& params, bool with_boundary, const FieldVector& e) {
  if (!(e.box() == params.box)) throw DimensionError("apply_A: field box differs from operator box");
  FieldVector out(e.box());
  apply_A(params, with_boundary, e.data(), out.data());
  return out;
}

}  // namespace flashmp
