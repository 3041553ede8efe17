#include "flashmp/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "flashmp/errors.hpp"

namespace flashmp {
namespace {

constexpr std::array<char, 4> kMagic{'F', 'M', 'P', 'F'};

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int s = 0; s < 4; ++s) b[s] = static_cast<char>((v >> (8 * s)) & 0xffu);
  os.write(b.data(), b.size());
}

void put_f64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (int s = 0; s < 8; ++s) b[s] = static_cast<char>((bits >> (8 * s)) & 0xffu);
  os.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw FormatError("truncated field header");
  std::uint32_t v = 0;
  for (int s = 0; s < 4; ++s) v |= static_cast<std::uint32_t>(b[s]) << (8 * s);
  return v;
}

double get_f64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw FormatError("truncated field payload");
  std::uint64_t bits = 0;
  for (int s = 0; s < 8; ++s) bits |= static_cast<std::uint64_t>(b[s]) << (8 * s);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(std::ostream& os, const FieldVector& field) {
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, kFieldFormatVersion);
  put_u32(os, static_cast<std::uint32_t>(field.box().nx));
  put_u32(os, static_cast<std::uint32_t>(field.box().ny));
  put_u32(os, static_cast<std::uint32_t>(field.box().nz));
  for (double v : field.data()) put_f64(os, v);
  if (!os) throw FormatError("failed writing field");
}

FieldVector read_field(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("not a field file (bad magic)");
  }
  const auto version = get_u32(is);
  if (version != kFieldFormatVersion) {
    throw FormatError("unsupported field format version " + std::to_string(version));
  }
  const auto nx = get_u32(is);
  const auto ny = get_u32(is);
  const auto nz = get_u32(is);
  Box box(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz));
  FieldVector field(box);
  for (double& v : field.data()) v = get_f64(is);
  return field;
}

void write_field(const std::filesystem::path& path, const FieldVector& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_field(os, field);
}

FieldVector read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_field(is);
}

}  // namespace flashmp
