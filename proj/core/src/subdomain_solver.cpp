#include "flashmp/subdomain_solver.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "flashmp/errors.hpp"

namespace flashmp {

Eigen::Matrix3d point_block(double alpha, double sigma_i, double sigma_j, double sigma_k) {
  const Eigen::Vector3d s(sigma_i, sigma_j, sigma_k);
  return Eigen::Matrix3d::Identity() +
         alpha * (s.squaredNorm() * Eigen::Matrix3d::Identity() - s * s.transpose());
}

BlockDiagonalInverse BlockDiagonalInverse::build(const TransformSet& ts, double alpha) {
  const Box& box = ts.box();
  BlockDiagonalInverse out{box, std::vector<double>(9 * box.volume())};
  const auto& sx = ts.axis(Axis::x).S;
  const auto& sy = ts.axis(Axis::y).S;
  const auto& sz = ts.axis(Axis::z).S;
  for (int k = 0; k < box.nz; ++k)
    for (int j = 0; j < box.ny; ++j)
      for (int i = 0; i < box.nx; ++i) {
        // B = (1 + alpha|s|^2) I - alpha s s^T, so B^-1 = (I + alpha s s^T) / (1 + alpha|s|^2).
        const Eigen::Vector3d s(sx(i), sy(j), sz(k));
        const Eigen::Matrix3d inv = (Eigen::Matrix3d::Identity() + alpha * s * s.transpose()) /
                                    (1.0 + alpha * s.squaredNorm());
        double* dst = out.blocks.data() + 9 * box.point(i, j, k);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) dst[3 * r + c] = inv(r, c);
      }
  return out;
}

Eigen::Matrix3d BlockDiagonalInverse::block(std::size_t point) const {
  Eigen::Matrix3d b;
  const double* src = blocks.data() + 9 * point;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) b(r, c) = src[3 * r + c];
  return b;
}

void BlockDiagonalInverse::apply(std::span<const double> in, std::span<double> out,
                                 OpCounter* counter) const {
  const std::size_t volume = box.volume();
  const double* b = blocks.data();
  for (std::size_t p = 0; p < volume; ++p, b += 9) {
    const double x0 = in[3 * p];
    const double x1 = in[3 * p + 1];
    const double x2 = in[3 * p + 2];
    out[3 * p] = b[0] * x0 + b[1] * x1 + b[2] * x2;
    out[3 * p + 1] = b[3] * x0 + b[4] * x1 + b[5] * x2;
    out[3 * p + 2] = b[6] * x0 + b[7] * x1 + b[8] * x2;
  }
  if (counter) counter->bspmv_flops += 18ull * volume;
}

std::size_t BoundaryCorrection::offset(int component) const {
  std::size_t off = 0;
  for (int c = 0; c < component; ++c) off += g[c].size();
  return off;
}

void BoundaryCorrection::gather(std::span<const double> field, std::span<double> coeffs,
                                std::size_t volume) const {
  std::size_t t = 0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t p : g[c]) coeffs[t++] = field[c * volume + p];
}

void BoundaryCorrection::scatter(std::span<const double> coeffs, std::span<double> field,
                                 std::size_t volume) const {
  std::fill(field.begin(), field.end(), 0.0);
  std::size_t t = 0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t p : g[c]) field[c * volume + p] = coeffs[t++];
}

BoundaryCorrection boundary_index_sets(const Box& box, FaceMask faces) {
  BoundaryCorrection corr;
  for (Axis l : kAxes) {
    const int c = static_cast<int>(l);
    for (int k = 1; k <= box.nz; ++k)
      for (int j = 1; j <= box.ny; ++j)
        for (int i = 1; i <= box.nx; ++i) {
          const int d = delta_boundary(box, l, i, j, k, faces);
          if (d != 0) {
            corr.g[c].push_back(box.point(i - 1, j - 1, k - 1));
            corr.v[c].push_back(d);
          }
        }
  }
  return corr;
}

CostModel cost_model(const Box& box, std::size_t m) {
  CostModel cm;
  cm.box = box;
  cm.correction_size = m;
  const std::uint64_t v = box.volume();
  const std::uint64_t nx = box.nx;
  const std::uint64_t ny = box.ny;
  const std::uint64_t nz = box.nz;
  const std::uint64_t mm = m;

  // G and G^-1 each run three contractions (2 n_axis V flops) on three components.
  cm.transform_flops_per_exact_solve = 12 * v * (nx + ny + nz);
  cm.block_flops_per_exact_solve = 18 * v;
  cm.flops_per_exact_solve = cm.transform_flops_per_exact_solve + cm.block_flops_per_exact_solve;
  cm.flops_per_correction = 2 * mm * mm;
  cm.flops_per_solve =
      m > 0 ? 2 * cm.flops_per_exact_solve + cm.flops_per_correction : cm.flops_per_exact_solve;

  const std::uint64_t faces = nx * ny + ny * nz + nz * nx;
  cm.table_flops = 2 * cm.transform_flops_per_exact_solve + 18 * v + 8 * faces * faces;

  cm.bytes_correction = 8 * mm * mm;
  cm.bytes_vectors = 2 * 24 * v;
  cm.bytes_factors = 8 * (2 * nx * nx + nx + 2 * ny * ny + ny + 2 * nz * nz + nz) + 72 * v;
  cm.bytes_resident = cm.bytes_correction + cm.bytes_vectors + cm.bytes_factors;

  const std::uint64_t dof = 3 * v;
  cm.direct_flops = 2 * dof * dof;
  cm.direct_bytes_inverse = 8 * dof * dof;
  cm.direct_bytes_vectors = 48 * v;
  return cm;
}

CostModel cost_model(const Box& box) {
  const std::size_t m = static_cast<std::size_t>(box.nx) * (box.ny + box.nz - 1) +
                        static_cast<std::size_t>(box.ny) * (box.nx + box.nz - 1) +
                        static_cast<std::size_t>(box.nz) * (box.nx + box.ny - 1);
  return cost_model(box, m);
}

void SolverWorkspace::reserve(const SubdomainSolverData& data) {
  const std::size_t dof = data.params.box.dof();
  const std::size_t m = data.corr.m();
  transform.reserve(data.params.box.volume());
  if (hat.size() < dof) hat.resize(dof);
  if (grid_in.size() < dof) grid_in.resize(dof);
  if (grid_out.size() < dof) grid_out.resize(dof);
  if (correction.size() < dof) correction.resize(dof);
  if (correction_solution.size() < dof) correction_solution.resize(dof);
  if (coeffs.size() < m) coeffs.resize(m);
  if (coeffs_out.size() < m) coeffs_out.resize(m);
}

void exact_solve(const SubdomainSolverData& data, std::span<const double> x, std::span<double> y,
                 SolverWorkspace& ws, OpCounter* counter) {
  const std::size_t dof = data.params.box.dof();
  if (x.size() != dof || y.size() != dof) {
    throw DimensionError("exact_solve: vector length does not match subdomain");
  }
  ws.reserve(data);
  std::span<double> hat(ws.hat.data(), dof);
  std::span<double> gin(ws.grid_in.data(), dof);
  std::span<double> gout(ws.grid_out.data(), dof);

  apply_G(data.ts, x, hat, ws.transform, counter);
  auto t0 = std::chrono::steady_clock::now();
  permute_to_grid_major(hat, gin);
  auto t1 = std::chrono::steady_clock::now();
  data.binv.apply(gin, gout, counter);
  auto t2 = std::chrono::steady_clock::now();
  permute_to_component_major(gout, hat);
  auto t3 = std::chrono::steady_clock::now();
  ws.reorder_seconds += std::chrono::duration<double>((t1 - t0) + (t3 - t2)).count();
  apply_G_inverse(data.ts, hat, y, ws.transform, counter);
}

FieldVector exact_solve(const SubdomainSolverData& data, const FieldVector& x) {
  FieldVector y(x.box());
  SolverWorkspace ws;
  exact_solve(data, x.data(), y.data(), ws);
  return y;
}

void solve(const SubdomainSolverData& data, std::span<const double> r, std::span<double> e,
           SolverWorkspace& ws, OpCounter* counter) {
  exact_solve(data, r, e, ws, counter);
  const BoundaryCorrection& corr = data.corr;
  if (!corr.active()) return;

  const std::size_t dof = data.params.box.dof();
  const std::size_t volume = data.params.box.volume();
  const auto m = static_cast<Eigen::Index>(corr.m());
  ws.reserve(data);
  std::span<double> cor_r(ws.correction.data(), dof);
  std::span<double> cor_e(ws.correction_solution.data(), dof);

  corr.gather(e, ws.coeffs, volume);
  Eigen::Map<const Eigen::VectorXd> q(ws.coeffs.data(), m);
  Eigen::Map<Eigen::VectorXd> z(ws.coeffs_out.data(), m);
  z.noalias() = corr.c_inv * q;
  if (counter) counter->gemv_flops += 2ull * static_cast<std::uint64_t>(m) * m;
  corr.scatter(std::span<const double>(ws.coeffs_out.data(), m), cor_r, volume);

  exact_solve(data, cor_r, cor_e, ws, counter);
  for (std::size_t p = 0; p < dof; ++p) e[p] -= cor_e[p];
}

FieldVector solve(const SubdomainSolverData& data, const FieldVector& r) {
  FieldVector e(r.box());
  SolverWorkspace ws;
  solve(data, r.data(), e.data(), ws);
  return e;
}

Eigen::MatrixXd correction_matrix(const SubdomainSolverData& data) {
  const BoundaryCorrection& corr = data.corr;
  const Box& box = data.params.box;
  const std::size_t volume = box.volume();
  const std::size_t dof = box.dof();
  const auto m = static_cast<Eigen::Index>(corr.m());
  Eigen::MatrixXd c(m, m);

  const auto fill_columns = [&](Eigen::Index begin, Eigen::Index end) {
    SolverWorkspace ws;
    std::vector<double> unit(m, 0.0);
    std::vector<double> col(dof);
    std::vector<double> sol(dof);
    for (Eigen::Index t = begin; t < end; ++t) {
      unit[t] = 1.0;
      corr.scatter(unit, col, volume);
      unit[t] = 0.0;
      exact_solve(data, col, sol, ws);
      corr.gather(sol, std::span<double>(c.col(t).data(), m), volume);
    }
  };

  const unsigned workers =
      std::clamp<unsigned>(std::thread::hardware_concurrency(), 1u,
                           static_cast<unsigned>(std::max<Eigen::Index>(1, m / 64)));
  if (workers <= 1) {
    fill_columns(0, m);
  } else {
    std::vector<std::jthread> pool;
    const Eigen::Index chunk = (m + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const Eigen::Index b = std::min<Eigen::Index>(m, w * chunk);
      const Eigen::Index e = std::min<Eigen::Index>(m, b + chunk);
      if (b < e) pool.emplace_back(fill_columns, b, e);
    }
  }

  Eigen::Index t = 0;
  for (int comp = 0; comp < 3; ++comp)
    for (int d : corr.v[comp]) {
      c(t, t) += 1.0 / (data.params.alpha * d);
      ++t;
    }
  // Exact symmetry of C is lost to round-off in the transforms; restore it.
  c = 0.5 * (c + c.transpose()).eval();
  return c;
}

SubdomainSolverData precompute(const OperatorParams& params) {
  SubdomainSolverData data;
  data.params = params;
  data.ts = TransformSet::for_box(params.box);
  data.binv = BlockDiagonalInverse::build(data.ts, params.alpha);
  // alpha = 0 makes W singular and the operator the identity: no correction.
  if (params.alpha > 0.0) data.corr = boundary_index_sets(params.box, params.corrected_faces);

  const std::size_t m = data.corr.m();
  if (m > 0) {
    const Eigen::MatrixXd c = correction_matrix(data);
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
      throw DegenerateConfigurationError(
          "boundary correction matrix is numerically singular (alpha = " +
          std::to_string(params.alpha) + ")");
    }
    data.corr.c_inv = llt.solve(Eigen::MatrixXd::Identity(c.rows(), c.cols()));
  }
  data.costs = cost_model(params.box, data.corr.active() ? m : 0);
  return data;
}

CostModel cost_report(const SubdomainSolverData& data) { return data.costs; }

}  // namespace flashmp
