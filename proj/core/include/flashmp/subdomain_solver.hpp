#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "flashmp/counters.hpp"
#include "flashmp/grid.hpp"
#include "flashmp/operators.hpp"
#include "flashmp/transform.hpp"

namespace flashmp {

/// B_ijk = I + alpha * (|s|^2 I - s s^T) with s = (sigma_i, sigma_j, sigma_k).
[[nodiscard]] Eigen::Matrix3d point_block(double alpha, double sigma_i, double sigma_j,
                                          double sigma_k);

/// Inverses of the per-point 3x3 blocks of the transformed operator, point-major,
/// each stored row-major (9 doubles).
struct BlockDiagonalInverse {
  Box box;
  std::vector<double> blocks;

  [[nodiscard]] static BlockDiagonalInverse build(const TransformSet& ts, double alpha);
  [[nodiscard]] Eigen::Matrix3d block(std::size_t point) const;

  /// out_p = B_p^{-1} in_p for grid-major triplets.
  void apply(std::span<const double> in, std::span<double> out, OpCounter* counter = nullptr) const;
};

/// Low-rank form of alpha*Lambda = Q W Q^T and the dense inverse of
/// C = W^{-1} + Q^T (I + alpha M)^{-1} Q.
struct BoundaryCorrection {
  std::array<std::vector<std::size_t>, 3> g;  // point indices with nonzero delta, per component
  std::array<std::vector<int>, 3> v;          // the delta values (1 or 2)
  Eigen::MatrixXd c_inv;

  [[nodiscard]] std::size_t m() const { return g[0].size() + g[1].size() + g[2].size(); }
  [[nodiscard]] std::size_t offset(int component) const;
  [[nodiscard]] bool active() const { return c_inv.size() > 0; }

  /// coeffs = Q^T field.
  void gather(std::span<const double> field, std::span<double> coeffs, std::size_t volume) const;
  /// field = Q coeffs (field is overwritten; entries outside the index sets are zeroed).
  void scatter(std::span<const double> coeffs, std::span<double> field, std::size_t volume) const;
};

[[nodiscard]] BoundaryCorrection boundary_index_sets(const Box& box, FaceMask faces);

/// Analytic flop and byte counts. Flop counts cover the GEMM, BSpMV and GEMV
/// call sites only; they match an instrumented run exactly.
struct CostModel {
  Box box;
  std::size_t correction_size = 0;  // m

  std::uint64_t transform_flops_per_exact_solve = 0;  // 12 * V * (nx + ny + nz)
  std::uint64_t block_flops_per_exact_solve = 0;      // 18 * V
  std::uint64_t flops_per_exact_solve = 0;
  std::uint64_t flops_per_correction = 0;  // 2 m^2
  std::uint64_t flops_per_solve = 0;       // what one solve() actually executes

  /// Leading-order total: two exact solves' transforms,
  /// one block multiply and the correction GEMV approximated as 8(nx ny + ny nz + nz nx)^2.
  /// For cubic n this is 144 n^4 + 18 n^3.
  std::uint64_t table_flops = 0;

  std::uint64_t bytes_correction = 0;  // 8 m^2
  std::uint64_t bytes_vectors = 0;     // E and R, 2 * 24 V
  std::uint64_t bytes_factors = 0;     // U, Vt, S per axis plus the B^-1 blocks
  std::uint64_t bytes_resident = 0;

  std::uint64_t direct_flops = 0;         // GEMV with a dense A^-1: 2 (3V)^2
  std::uint64_t direct_bytes_inverse = 0;  // 8 (3V)^2
  std::uint64_t direct_bytes_vectors = 0;  // 48 V
};

/// Cost of the solver on `box` with a correction block of size m.
[[nodiscard]] CostModel cost_model(const Box& box, std::size_t m);
/// Cost with the full low-face correction (m = sum of nx(ny+nz-1) and permutations).
[[nodiscard]] CostModel cost_model(const Box& box);

struct SubdomainSolverData {
  OperatorParams params;
  TransformSet ts;
  BlockDiagonalInverse binv;
  BoundaryCorrection corr;
  CostModel costs;
};

/// Per-call scratch so that concurrent solves never share buffers.
struct SolverWorkspace {
  TransformWorkspace transform;
  std::vector<double> hat;
  std::vector<double> grid_in;
  std::vector<double> grid_out;
  std::vector<double> coeffs;
  std::vector<double> coeffs_out;
  std::vector<double> correction;
  std::vector<double> correction_solution;
  double reorder_seconds = 0.0;  // accumulated time in the P / P^T permutations
  void reserve(const SubdomainSolverData& data);
};

/// Builds transforms, block inverses, boundary index sets and C^-1. C is formed
/// column by column from exact solves of the selection columns Q e_t.
/// Throws DegenerateConfigurationError when C is numerically singular.
[[nodiscard]] SubdomainSolverData precompute(const OperatorParams& params);

/// The dense matrix C = W^{-1} + Q^T (I + alpha M)^{-1} Q built with exact_solve.
[[nodiscard]] Eigen::MatrixXd correction_matrix(const SubdomainSolverData& data);

/// (I + alpha M)^{-1} x = G^{-1} P^T diag(B^{-1}) P G x.
void exact_solve(const SubdomainSolverData& data, std::span<const double> x, std::span<double> y,
                 SolverWorkspace& ws, OpCounter* counter = nullptr);
[[nodiscard]] FieldVector exact_solve(const SubdomainSolverData& data, const FieldVector& x);

/// (I + alpha M + alpha Lambda)^{-1} r by the Woodbury correction.
void solve(const SubdomainSolverData& data, std::span<const double> r, std::span<double> e,
           SolverWorkspace& ws, OpCounter* counter = nullptr);
[[nodiscard]] FieldVector solve(const SubdomainSolverData& data, const FieldVector& r);

[[nodiscard]] CostModel cost_report(const SubdomainSolverData& data);

}  // namespace flashmp
