#include "flashmp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flashmp/errors.hpp"

namespace flashmp {

Box::Box(int nx_, int ny_, int nz_) : nx(nx_), ny(ny_), nz(nz_) {
  if (nx < 1 || ny < 1 || nz < 1) {
    throw DimensionError("box extents must be positive, got (" + std::to_string(nx) + "," +
                         std::to_string(ny) + "," + std::to_string(nz) + ")");
  }
}

int Box::extent(Axis a) const {
  switch (a) {
    case Axis::x:
      return nx;
    case Axis::y:
      return ny;
    case Axis::z:
      return nz;
  }
  return 0;
}

FieldVector::FieldVector(Box box) : box_(box), data_(box.dof(), 0.0) {}

FieldVector::FieldVector(Box box, std::vector<double> data) : box_(box), data_(std::move(data)) {
  if (data_.size() != box_.dof()) {
    throw DimensionError("field data length " + std::to_string(data_.size()) +
                         " does not match 3*volume = " + std::to_string(box_.dof()));
  }
}

std::span<double> FieldVector::component(int c) {
  return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * box_.volume(),
                                          box_.volume());
}

std::span<const double> FieldVector::component(int c) const {
  return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * box_.volume(),
                                                box_.volume());
}

bool FieldVector::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

GridMajorVector::GridMajorVector(Box box) : box_(box), data_(box.dof(), 0.0) {}

void permute_to_grid_major(std::span<const double> component_major, std::span<double> grid_major) {
  const std::size_t volume = component_major.size() / 3;
  const double* ex = component_major.data();
  const double* ey = ex + volume;
  const double* ez = ey + volume;
  double* out = grid_major.data();
  for (std::size_t p = 0; p < volume; ++p) {
    out[3 * p + 0] = ex[p];
    out[3 * p + 1] = ey[p];
    out[3 * p + 2] = ez[p];
  }
}

void permute_to_component_major(std::span<const double> grid_major,
                                std::span<double> component_major) {
  const std::size_t volume = grid_major.size() / 3;
  double* ex = component_major.data();
  double* ey = ex + volume;
  double* ez = ey + volume;
  const double* in = grid_major.data();
  for (std::size_t p = 0; p < volume; ++p) {
    ex[p] = in[3 * p + 0];
    ey[p] = in[3 * p + 1];
    ez[p] = in[3 * p + 2];
  }
}

GridMajorVector permute_to_grid_major(const FieldVector& v) {
  GridMajorVector out(v.box());
  permute_to_grid_major(v.data(), out.data());
  return out;
}

FieldVector permute_to_component_major(const GridMajorVector& v) {
  FieldVector out(v.box());
  permute_to_component_major(v.data(), out.data());
  return out;
}

}  // namespace flashmp
