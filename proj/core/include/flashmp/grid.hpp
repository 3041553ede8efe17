#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace flashmp {

enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

/// Extents of a structured box of grid points. Points are addressed with
/// i (x) fastest, then j, then k.
struct Box {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  Box() = default;
  Box(int nx_, int ny_, int nz_);

  [[nodiscard]] static Box cube(int n) { return {n, n, n}; }

  [[nodiscard]] std::size_t volume() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  [[nodiscard]] std::size_t dof() const { return 3 * volume(); }
  [[nodiscard]] int extent(Axis a) const;
  [[nodiscard]] bool is_cube() const { return nx == ny && ny == nz; }

  /// Linear point index of (i, j, k), 0-based.
  [[nodiscard]] std::size_t point(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(ny) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(i);
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// The electric (or magnetic) field: three scalar components over a box,
/// stored component-major. Linear index of (c, i, j, k) is
/// c*V + k*nx*ny + j*nx + i with V = nx*ny*nz.
class FieldVector {
 public:
  FieldVector() = default;
  explicit FieldVector(Box box);
  FieldVector(Box box, std::vector<double> data);

  [[nodiscard]] const Box& box() const { return box_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  [[nodiscard]] std::span<double> data() { return data_; }
  [[nodiscard]] std::span<const double> data() const { return data_; }
  [[nodiscard]] std::vector<double>& storage() { return data_; }
  [[nodiscard]] const std::vector<double>& storage() const { return data_; }

  [[nodiscard]] std::span<double> component(int c);
  [[nodiscard]] std::span<const double> component(int c) const;

  [[nodiscard]] double& at(int c, int i, int j, int k) {
    return data_[static_cast<std::size_t>(c) * box_.volume() + box_.point(i, j, k)];
  }
  [[nodiscard]] double at(int c, int i, int j, int k) const {
    return data_[static_cast<std::size_t>(c) * box_.volume() + box_.point(i, j, k)];
  }

  [[nodiscard]] bool all_finite() const;

  friend bool operator==(const FieldVector&, const FieldVector&) = default;

 private:
  Box box_;
  std::vector<double> data_;
};

/// Same unknowns as FieldVector, ordered as per-point triplets
/// (e_x, e_y, e_z) with the point index i-fastest.
class GridMajorVector {
 public:
  GridMajorVector() = default;
  explicit GridMajorVector(Box box);

  [[nodiscard]] const Box& box() const { return box_; }
  [[nodiscard]] std::span<double> data() { return data_; }
  [[nodiscard]] std::span<const double> data() const { return data_; }

  friend bool operator==(const GridMajorVector&, const GridMajorVector&) = default;

 private:
  Box box_;
  std::vector<double> data_;
};

[[nodiscard]] GridMajorVector permute_to_grid_major(const FieldVector& v);
[[nodiscard]] FieldVector permute_to_component_major(const GridMajorVector& v);

/// Buffer-reusing variants used inside the subdomain solver.
void permute_to_grid_major(std::span<const double> component_major, std::span<double> grid_major);
void permute_to_component_major(std::span<const double> grid_major,
                                std::span<double> component_major);

}  // namespace flashmp
