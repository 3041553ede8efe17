#include "flashmp/partition.hpp"

#include <algorithm>
#include <string>

#include "flashmp/errors.hpp"

namespace flashmp {

bool Region::contains(const Index3& g) const {
  const Index3 e = end();
  for (int a = 0; a < 3; ++a)
    if (g[a] < offset[a] || g[a] >= e[a]) return false;
  return true;
}

Overlap intersect(const Region& a, const Region& b) {
  Index3 lo{};
  Index3 hi{};
  const Index3 ea = a.end();
  const Index3 eb = b.end();
  for (int d = 0; d < 3; ++d) {
    lo[d] = std::max(a.offset[d], b.offset[d]);
    hi[d] = std::min(ea[d], eb[d]);
    if (hi[d] <= lo[d]) return {};
  }
  return {true, Region{lo, Box(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2])}};
}

Partition::Partition(Box global, ProcGrid grid, int overlap)
    : global_(global), grid_(grid), overlap_(overlap) {
  if (grid.px < 1 || grid.py < 1 || grid.pz < 1) throw SizingError("process grid must be positive");
  if (overlap < 0) throw SizingError("overlap must be non-negative");
  for (Axis a : kAxes) {
    const int n = global.extent(a);
    const int p = grid.along(a);
    if (n % p != 0) {
      throw SizingError("global extent " + std::to_string(n) + " is not divisible by " +
                        std::to_string(p) + " ranks along axis " +
                        std::to_string(static_cast<int>(a)));
    }
    if (p > 1 && overlap > n / p) {
      throw SizingError("overlap " + std::to_string(overlap) + " exceeds the owned extent " +
                        std::to_string(n / p));
    }
  }
  const Index3 sub{global.nx / grid.px, global.ny / grid.py, global.nz / grid.pz};
  const Index3 dims{grid.px, grid.py, grid.pz};
  const Index3 ext{global.nx, global.ny, global.nz};
  ranks_.resize(static_cast<std::size_t>(grid.size()));
  for (int cz = 0; cz < grid.pz; ++cz)
    for (int cy = 0; cy < grid.py; ++cy)
      for (int cx = 0; cx < grid.px; ++cx) {
        const Index3 c{cx, cy, cz};
        RankLayout& r = ranks_[static_cast<std::size_t>(rank_of(c))];
        r.rank = rank_of(c);
        r.coords = c;
        Index3 lo{};
        Index3 hi{};
        for (int d = 0; d < 3; ++d) {
          r.owned.offset[d] = c[d] * sub[d];
          lo[d] = std::max(0, r.owned.offset[d] - overlap);
          hi[d] = std::min(ext[d], r.owned.offset[d] + sub[d] + overlap);
        }
        r.owned.box = Box(sub[0], sub[1], sub[2]);
        r.extended = Region{lo, Box(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2])};
        for (int dz = -1; dz <= 1; ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              if (dx == 0 && dy == 0 && dz == 0) continue;
              const Index3 nc{cx + dx, cy + dy, cz + dz};
              bool inside = true;
              for (int d = 0; d < 3; ++d) inside = inside && nc[d] >= 0 && nc[d] < dims[d];
              if (inside) r.neighbors.push_back({rank_of(nc), {dx, dy, dz}});
            }
      }
}

int Partition::rank_of(const Index3& c) const {
  return c[0] + grid_.px * (c[1] + grid_.py * c[2]);
}

FaceMask Partition::corrected_faces(int r, bool global_with_boundary) const {
  const auto phys = rank(r).physical_low();
  return {!phys[0] || global_with_boundary, !phys[1] || global_with_boundary,
          !phys[2] || global_with_boundary};
}

Partition make_partition(const Box& global, const ProcGrid& grid, int overlap) {
  return {global, grid, overlap};
}

void copy_region(const Region& shared, const Region& from, std::span<const double> src,
                 const Region& to, std::span<double> dst) {
  const std::size_t vf = from.box.volume();
  const std::size_t vt = to.box.volume();
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < shared.box.nz; ++k)
      for (int j = 0; j < shared.box.ny; ++j) {
        const int gk = shared.offset[2] + k;
        const int gj = shared.offset[1] + j;
        const int gi = shared.offset[0];
        const std::size_t s = c * vf + from.box.point(gi - from.offset[0], gj - from.offset[1],
                                                      gk - from.offset[2]);
        const std::size_t d =
            c * vt + to.box.point(gi - to.offset[0], gj - to.offset[1], gk - to.offset[2]);
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(s), shared.box.nx,
                    dst.begin() + static_cast<std::ptrdiff_t>(d));
      }
}

}  // namespace flashmp
