#pragma once

#include <filesystem>
#include <iosfwd>

#include "flashmp/grid.hpp"

namespace flashmp {

// Binary field dump, little-endian:
//   "FMPF" | u32 version = 1 | u32 nx | u32 ny | u32 nz | 3*nx*ny*nz f64 (component-major)
inline constexpr std::uint32_t kFieldFormatVersion = 1;

void write_field(std::ostream& os, const FieldVector& field);
[[nodiscard]] FieldVector read_field(std::istream& is);

void write_field(const std::filesystem::path& path, const FieldVector& field);
[[nodiscard]] FieldVector read_field(const std::filesystem::path& path);

}  // namespace flashmp
