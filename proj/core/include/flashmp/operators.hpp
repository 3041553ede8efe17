#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "flashmp/grid.hpp"

namespace flashmp {

enum class DifferenceKind { forward, backward };

/// First-order difference on n points with homogeneous Dirichlet closure.
/// Forward: -1 on the diagonal, +1 on the superdiagonal. Backward is -(forward)^T.
struct DifferenceMatrix {
  int n = 1;
  DifferenceKind kind = DifferenceKind::forward;

  [[nodiscard]] Eigen::MatrixXd dense() const;
  /// out = D * in for a single line of n values.
  void apply(std::span<const double> in, std::span<double> out) const;
};

[[nodiscard]] DifferenceMatrix build_forward_difference(int n);
[[nodiscard]] DifferenceMatrix build_backward_difference(int n);

/// out += scale * D_axis * in, where in/out are scalar grids on `box`.
void accumulate_difference(DifferenceKind kind, Axis axis, const Box& box, double scale,
                           std::span<const double> in, std::span<double> out);

/// Block curl with all-forward or all-backward differences:
///   out_x = -D_z E_y + D_y E_z
///   out_y =  D_z E_x - D_x E_z
///   out_z = -D_y E_x + D_x E_y
[[nodiscard]] FieldVector apply_curl(DifferenceKind kind, const FieldVector& e);
void apply_curl(DifferenceKind kind, const Box& box, std::span<const double> in,
                std::span<double> out);

/// M E = curl_backward(curl_forward(E)).
[[nodiscard]] FieldVector apply_double_curl(const FieldVector& e);

/// Which low-index faces of a box carry the Dirichlet diagonal correction.
/// A face is left uncorrected when the enclosing global operator has no
/// correction there either (a clamped subdomain face on an uncorrected
/// physical boundary).
struct FaceMask {
  bool x = true;
  bool y = true;
  bool z = true;

  [[nodiscard]] static FaceMask all() { return {}; }
  [[nodiscard]] static FaceMask none() { return {false, false, false}; }
  [[nodiscard]] bool on(Axis a) const {
    return a == Axis::x ? x : (a == Axis::y ? y : z);
  }
  friend bool operator==(const FaceMask&, const FaceMask&) = default;
};

/// Boundary correction count for component `l` at the 1-based point (i, j, k):
/// 2 if both transverse indices sit on a low face, 1 if exactly one does, else 0.
/// Transverse pairs are (j,k) for x, (i,k) for y, (i,j) for z.
[[nodiscard]] int delta_boundary(const Box& box, Axis l, int i, int j, int k,
                                 FaceMask faces = FaceMask::all());

struct OperatorParams {
  Box box;
  double alpha = 0.25;  // dt^2 / 4
  FaceMask corrected_faces = FaceMask::all();

  OperatorParams() = default;
  OperatorParams(Box b, double a, FaceMask f = FaceMask::all());
};

/// Diagonal of Lambda in component-major order (values in {0, 1, 2}).
[[nodiscard]] std::vector<double> boundary_diagonal(const Box& box, FaceMask faces = FaceMask::all());

/// E + alpha*M*E (+ alpha*Lambda*E when with_boundary).
[[nodiscard]] FieldVector apply_A(const OperatorParams& params, bool with_boundary,
                                  const FieldVector& e);
void apply_A(const OperatorParams& params, bool with_boundary, std::span<const double> in,
             std::span<double> out);

}  // namespace flashmp
