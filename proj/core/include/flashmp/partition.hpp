#pragma once

#include <array>
#include <span>
#include <vector>

#include "flashmp/grid.hpp"
#include "flashmp/operators.hpp"

namespace flashmp {

struct ProcGrid {
  int px = 1;
  int py = 1;
  int pz = 1;
  [[nodiscard]] int size() const { return px * py * pz; }
  [[nodiscard]] int along(Axis a) const { return a == Axis::x ? px : (a == Axis::y ? py : pz); }
  friend bool operator==(const ProcGrid&, const ProcGrid&) = default;
};

using Index3 = std::array<int, 3>;

/// A box placed in the global grid: global coordinates [offset, offset + extents).
struct Region {
  Index3 offset{0, 0, 0};
  Box box;

  [[nodiscard]] Index3 end() const {
    return {offset[0] + box.nx, offset[1] + box.ny, offset[2] + box.nz};
  }
  [[nodiscard]] bool contains(const Index3& g) const;
  friend bool operator==(const Region&, const Region&) = default;
};

/// Intersection of two regions; `found` is false when they do not overlap.
struct Overlap {
  bool found = false;
  Region region;
};
[[nodiscard]] Overlap intersect(const Region& a, const Region& b);

struct Neighbor {
  int rank = 0;
  Index3 direction{0, 0, 0};  // each in {-1, 0, 1}
};

struct RankLayout {
  int rank = 0;
  Index3 coords{0, 0, 0};
  Region owned;
  Region extended;  // owned grown by the overlap per side, clamped to the global box
  std::vector<Neighbor> neighbors;

  /// Low faces of the extended box that touch the physical boundary.
  [[nodiscard]] std::array<bool, 3> physical_low() const {
    return {extended.offset[0] == 0, extended.offset[1] == 0, extended.offset[2] == 0};
  }
};

/// Global box split into px*py*pz equal owned boxes; ranks ordered x fastest.
class Partition {
 public:
  Partition(Box global, ProcGrid grid, int overlap);

  [[nodiscard]] const Box& global_box() const { return global_; }
  [[nodiscard]] const ProcGrid& proc_grid() const { return grid_; }
  [[nodiscard]] int overlap() const { return overlap_; }
  [[nodiscard]] int size() const { return static_cast<int>(ranks_.size()); }
  [[nodiscard]] const RankLayout& rank(int r) const { return ranks_.at(static_cast<std::size_t>(r)); }
  [[nodiscard]] const std::vector<RankLayout>& ranks() const { return ranks_; }
  [[nodiscard]] int rank_of(const Index3& coords) const;

  /// Same owned decomposition with a different overlap.
  [[nodiscard]] Partition with_overlap(int overlap) const { return {global_, grid_, overlap}; }

  /// Low faces of a rank's extended box that carry the Dirichlet correction when
  /// the global operator is (or is not) itself corrected on its low faces.
  [[nodiscard]] FaceMask corrected_faces(int r, bool global_with_boundary) const;

 private:
  Box global_;
  ProcGrid grid_;
  int overlap_ = 0;
  std::vector<RankLayout> ranks_;
};

/// Throws SizingError if an extent is not divisible by the process grid or the
/// overlap is negative or wider than an owned box.
[[nodiscard]] Partition make_partition(const Box& global, const ProcGrid& grid, int overlap);

/// Copies between a field on `from` and a field on `to` over their shared region.
void copy_region(const Region& shared, const Region& from, std::span<const double> src,
                 const Region& to, std::span<double> dst);

}  // namespace flashmp
