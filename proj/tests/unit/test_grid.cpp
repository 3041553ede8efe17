#include <gtest/gtest.h>

#include <sstream>

#include "dense_oracle.hpp"
#include "flashmp/errors.hpp"
#include "flashmp/field_io.hpp"
#include "flashmp/grid.hpp"
#include "flashmp/random.hpp"

namespace flashmp {
namespace {

TEST(Box, RejectsNonPositiveExtents) {
  EXPECT_THROW(Box(0, 1, 1), DimensionError);
  EXPECT_THROW(Box(2, -1, 3), DimensionError);
  const Box b(2, 3, 4);
  EXPECT_EQ(b.volume(), 24u);
  EXPECT_EQ(b.dof(), 72u);
}

TEST(FieldVector, ComponentMajorLinearIndex) {
  const Box box(3, 4, 5);
  for (int c = 0; c < 3; ++c) {
    FieldVector f(box);
    f.at(c, 2, 1, 3) = 1.0;
    const std::size_t expected = c * 60 + 3 * 12 + 1 * 3 + 2;
    for (std::size_t p = 0; p < f.size(); ++p) EXPECT_EQ(f.data()[p], p == expected ? 1.0 : 0.0);
  }
}

TEST(Permutation, SinglePointIsIdentity) {
  FieldVector v(Box(1, 1, 1), {1.5, -2.0, 3.25});
  const auto g = permute_to_grid_major(v);
  EXPECT_EQ(std::vector<double>(g.data().begin(), g.data().end()),
            (std::vector<double>{1.5, -2.0, 3.25}));
  EXPECT_EQ(permute_to_component_major(g), v);
}

TEST(Permutation, TwoPointReorder) {
  // [x0,x1,y0,y1,z0,z1] -> [x0,y0,z0,x1,y1,z1]
  FieldVector v(Box(2, 1, 1), {10, 11, 20, 21, 30, 31});
  const auto g = permute_to_grid_major(v);
  EXPECT_EQ(std::vector<double>(g.data().begin(), g.data().end()),
            (std::vector<double>{10, 20, 30, 11, 21, 31}));
}

TEST(Permutation, MatchesExplicitMatrixOnBox222) {
  const Box box(2, 2, 2);
  const auto p = oracle::permutation(box);
  ASSERT_EQ(p.rows(), 24);
  const auto v = random_field(box, 7);
  const Eigen::VectorXd want = p * oracle::to_eigen(v.data());
  const auto g = permute_to_grid_major(v);
  EXPECT_EQ(oracle::to_eigen(g.data()), want);
  const Eigen::VectorXd back = p.transpose() * want;
  EXPECT_EQ(oracle::to_eigen(permute_to_component_major(g).data()), back);
}

TEST(Permutation, RoundTripIsBitExactOverRandomBoxes) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Box box(1 + static_cast<int>(rng.next() % 6), 1 + static_cast<int>(rng.next() % 6),
                  1 + static_cast<int>(rng.next() % 6));
    const auto v = random_field(box, rng.next());
    EXPECT_EQ(permute_to_component_major(permute_to_grid_major(v)), v);
  }
}

TEST(FieldIo, RoundTripAndHeaderLayout) {
  const auto f = random_field(Box(2, 3, 1), 3);
  std::stringstream ss;
  write_field(ss, f);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 16u + 8u * f.size());
  EXPECT_EQ(bytes.substr(0, 4), "FMPF");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);  // version, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2u);  // nx
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 3u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 1u);
  EXPECT_EQ(read_field(ss), f);
}

TEST(FieldIo, RejectsBadMagicAndTruncation) {
  std::stringstream bad("XXXX");
  EXPECT_THROW((void)read_field(bad), FormatError);
  const auto f = random_field(Box(2, 2, 2), 1);
  std::stringstream ss;
  write_field(ss, f);
  std::stringstream cut(ss.str().substr(0, 40));
  EXPECT_THROW((void)read_field(cut), FormatError);
}

}  // namespace
}  // namespace flashmp
