#include "flashmp/transform.hpp"

#include <map>
#include <mutex>

#include "flashmp/errors.hpp"
#include "flashmp/operators.hpp"

namespace flashmp {

AxisSvd svd_of_difference(int n) {
  const Eigen::MatrixXd d = build_forward_difference(n).dense();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  for (int c = 0; c < n; ++c) {
    int r = 0;
    while (r < n && std::abs(v(r, c)) < 1e-14) ++r;
    if (r < n && v(r, c) < 0.0) {
      v.col(c) = -v.col(c);
      u.col(c) = -u.col(c);
    }
  }
  return {n, std::move(u), svd.singularValues(), v.transpose()};
}

std::shared_ptr<const AxisSvd> cached_svd_of_difference(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const AxisSvd>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const AxisSvd>(svd_of_difference(n));
  return slot;
}

TransformSet::TransformSet(Box box, std::shared_ptr<const AxisSvd> x,
                           std::shared_ptr<const AxisSvd> y, std::shared_ptr<const AxisSvd> z)
    : box_(box), x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
  if (!x_ || !y_ || !z_ || x_->n != box.nx || y_->n != box.ny || z_->n != box.nz) {
    throw DimensionError("transform factors do not match box extents");
  }
}

TransformSet TransformSet::for_box(const Box& box) {
  return {box, cached_svd_of_difference(box.nx), cached_svd_of_difference(box.ny),
          cached_svd_of_difference(box.nz)};
}

const AxisSvd& TransformSet::axis(Axis a) const {
  return a == Axis::x ? *x_ : (a == Axis::y ? *y_ : *z_);
}

void TransformWorkspace::reserve(std::size_t volume) {
  if (a.size() < volume) a.resize(volume);
  if (b.size() < volume) b.resize(volume);
  if (ping.size() < volume) ping.resize(volume);
  if (pong.size() < volume) pong.resize(volume);
}

void contract_axis(Axis axis, const Eigen::Ref<const Eigen::MatrixXd>& t, const Box& box,
                   std::span<const double> in, std::span<double> out, TransformWorkspace& ws,
                   OpCounter* counter) {
  using Map = Eigen::Map<Eigen::MatrixXd>;
  using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
  const int n = box.extent(axis);
  if (t.rows() != n || t.cols() != n) {
    throw DimensionError("contract_axis: matrix size does not match axis extent");
  }
  if (in.size() != box.volume() || out.size() != box.volume()) {
    throw DimensionError("contract_axis: grid length mismatch");
  }
  const Eigen::Index nx = box.nx;
  const Eigen::Index ny = box.ny;
  const Eigen::Index nz = box.nz;
  switch (axis) {
    case Axis::x: {
      // x is already the leading index: (nx) x (ny*nz).
      ConstMap f(in.data(), nx, ny * nz);
      Map o(out.data(), nx, ny * nz);
      o.noalias() = t * f;
      break;
    }
    case Axis::y: {
      // Transpose to y-x-z so that y leads, contract, transpose back.
      ws.reserve(box.volume());
      double* yxz = ws.a.data();
      double* res = ws.b.data();
      for (Eigen::Index k = 0; k < nz; ++k)
        for (Eigen::Index j = 0; j < ny; ++j)
          for (Eigen::Index i = 0; i < nx; ++i)
            yxz[j + ny * (i + nx * k)] = in[i + nx * (j + ny * k)];
      ConstMap f(yxz, ny, nx * nz);
      Map o(res, ny, nx * nz);
      o.noalias() = t * f;
      for (Eigen::Index k = 0; k < nz; ++k)
        for (Eigen::Index j = 0; j < ny; ++j)
          for (Eigen::Index i = 0; i < nx; ++i)
            out[i + nx * (j + ny * k)] = res[j + ny * (i + nx * k)];
      break;
    }
    case Axis::z: {
      // z is the trailing index: out^T = T * in^T with in viewed as (nx*ny) x nz.
      ConstMap f(in.data(), nx * ny, nz);
      Map o(out.data(), nx * ny, nz);
      o.noalias() = f * t.transpose();
      break;
    }
  }
  if (counter) counter->gemm_flops += 2ull * static_cast<std::uint64_t>(n) * box.volume();
}

std::vector<double> contract_axis(Axis axis, const Eigen::Ref<const Eigen::MatrixXd>& t,
                                  const Box& box, std::span<const double> in) {
  std::vector<double> out(box.volume());
  TransformWorkspace ws;
  contract_axis(axis, t, box, in, out, ws);
  return out;
}

std::vector<double> contract_axis_naive(Axis axis, const Eigen::MatrixXd& t, const Box& box,
                                        std::span<const double> in) {
  const int n = box.extent(axis);
  if (t.rows() != n || t.cols() != n) {
    throw DimensionError("contract_axis: matrix size does not match axis extent");
  }
  std::vector<double> out(box.volume(), 0.0);
  for (int k = 0; k < box.nz; ++k)
    for (int j = 0; j < box.ny; ++j)
      for (int i = 0; i < box.nx; ++i) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
          switch (axis) {
            case Axis::x:
              acc += t(i, m) * in[box.point(m, j, k)];
              break;
            case Axis::y:
              acc += t(j, m) * in[box.point(i, m, k)];
              break;
            case Axis::z:
              acc += t(k, m) * in[box.point(i, j, m)];
              break;
          }
        }
        out[box.point(i, j, k)] = acc;
      }
  return out;
}

namespace {

template <bool Inverse>
void transform_components(const TransformSet& ts, std::span<const double> in,
                          std::span<double> out, TransformWorkspace& ws, OpCounter* counter) {
  const Box& box = ts.box();
  const std::size_t v = box.volume();
  if (in.size() != box.dof() || out.size() != box.dof()) {
    throw DimensionError("transform: field length does not match box");
  }
  ws.reserve(v);
  std::span<double> ping(ws.ping.data(), v);
  std::span<double> pong(ws.pong.data(), v);
  for (int c = 0; c < 3; ++c) {
    auto src = in.subspan(c * v, v);
    auto dst = out.subspan(c * v, v);
    const auto factor = [&](Axis a) -> Eigen::MatrixXd {
      const AxisSvd& s = ts.axis(a);
      const bool use_u = static_cast<int>(a) == c;
      if constexpr (Inverse) {
        return use_u ? s.U : s.Vt.transpose();
      } else {
        return use_u ? s.U.transpose() : Eigen::MatrixXd(s.Vt);
      }
    };
    contract_axis(Axis::x, factor(Axis::x), box, src, ping, ws, counter);
    contract_axis(Axis::y, factor(Axis::y), box, ping, pong, ws, counter);
    contract_axis(Axis::z, factor(Axis::z), box, pong, dst, ws, counter);
  }
}

}  // namespace

void apply_G(const TransformSet& ts, std::span<const double> in, std::span<double> out,
             TransformWorkspace& ws, OpCounter* counter) {
  transform_components<false>(ts, in, out, ws, counter);
}

void apply_G_inverse(const TransformSet& ts, std::span<const double> in, std::span<double> out,
                     TransformWorkspace& ws, OpCounter* counter) {
  transform_components<true>(ts, in, out, ws, counter);
}

FieldVector apply_G(const TransformSet& ts, const FieldVector& e) {
  FieldVector out(e.box());
  TransformWorkspace ws;
  apply_G(ts, e.data(), out.data(), ws);
  return out;
}

FieldVector apply_G_inverse(const TransformSet& ts, const FieldVector& e) {
  FieldVector out(e.box());
  TransformWorkspace ws;
  apply_G_inverse(ts, e.data(), out.data(), ws);
  return out;
}

}  // namespace flashmp
