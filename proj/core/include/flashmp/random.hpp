#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "flashmp/grid.hpp"

namespace flashmp {

/// Seeded 64-bit generator producing uniform doubles in [-1, 1]. The mapping from
/// raw 64-bit draws to doubles is explicit so streams are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform_pm1() {
    const std::uint64_t bits = engine_() >> 11;  // 53 random bits
    return 2.0 * (static_cast<double>(bits) * 0x1.0p-53) - 1.0;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform_pm1();
  return v;
}

inline FieldVector random_field(const Box& box, std::uint64_t seed) {
  return FieldVector(box, random_values(box.dof(), seed));
}

}  // namespace flashmp
