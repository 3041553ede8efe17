#include <gtest/gtest.h>

#include <sstream>

#include "dense_oracle.hpp"
#include "flashmp/distributed.hpp"
#include "flashmp/errors.hpp"
#include "flashmp/exchanger.hpp"
#include "flashmp/partition.hpp"
#include "flashmp/random.hpp"
#include "flashmp/ras.hpp"
#include "flashmp/sparse_operator.hpp"
#include "flashmp/transport.hpp"

namespace flashmp {
namespace {

std::size_t global_index(const Box& g, int c, int i, int j, int k) {
  return static_cast<std::size_t>(c) * g.volume() + g.point(i, j, k);
}

// Rows select the cells of `region` (component-major, i fastest) out of the global vector.
Eigen::MatrixXd selection(const Box& global, const Region& region) {
  const Eigen::Index rows = static_cast<Eigen::Index>(region.box.dof());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(global.dof()));
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < region.box.nz; ++k)
      for (int j = 0; j < region.box.ny; ++j)
        for (int i = 0; i < region.box.nx; ++i) {
          const auto row = static_cast<Eigen::Index>(global_index(region.box, c, i, j, k));
          const auto col = static_cast<Eigen::Index>(global_index(
              global, c, region.offset[0] + i, region.offset[1] + j, region.offset[2] + k));
          s(row, col) = 1.0;
        }
  return s;
}

Eigen::MatrixXd masked_operator(const Box& box, double alpha, FaceMask faces) {
  Eigen::MatrixXd a = oracle::operator_matrix(box, alpha, false);
  a.diagonal() += alpha * oracle::lambda_diagonal(box, faces.x, faces.y, faces.z);
  return a;
}

TEST(Partition, SingleRankExtendedEqualsOwned) {
  const Partition p(Box::cube(32), {1, 1, 1}, 2);
  ASSERT_EQ(p.size(), 1);
  EXPECT_EQ(p.rank(0).owned, p.rank(0).extended);
  EXPECT_TRUE(p.rank(0).neighbors.empty());
}

TEST(Partition, EightRanksOverlapOne) {
  const Partition p(Box::cube(32), {2, 2, 2}, 1);
  ASSERT_EQ(p.size(), 8);
  for (const auto& r : p.ranks()) {
    EXPECT_EQ(r.owned.box, Box::cube(16));
    EXPECT_EQ(r.extended.box, Box::cube(17));
    EXPECT_EQ(r.neighbors.size(), 7u);
  }
  EXPECT_EQ(p.rank(0).extended.offset, (Index3{0, 0, 0}));
  EXPECT_EQ(p.rank(7).extended.offset, (Index3{15, 15, 15}));
  EXPECT_EQ(p.rank_of({1, 0, 0}), 1);
  EXPECT_EQ(p.rank_of({0, 1, 0}), 2);
  EXPECT_EQ(p.rank_of({0, 0, 1}), 4);
}

TEST(Partition, InteriorRankHasAllNeighbors) {
  const Partition p(Box::cube(12), {3, 3, 3}, 1);
  const auto& centre = p.rank(p.rank_of({1, 1, 1}));
  EXPECT_EQ(centre.neighbors.size(), 26u);
  EXPECT_EQ(centre.extended.box, Box::cube(6));
}

TEST(Partition, RejectsBadSizing) {
  EXPECT_THROW((void)make_partition(Box(30, 32, 32), {4, 1, 1}, 1), SizingError);
  EXPECT_THROW((void)make_partition(Box::cube(32), {2, 2, 2}, -1), SizingError);
  EXPECT_THROW((void)make_partition(Box::cube(8), {2, 1, 1}, 5), SizingError);
  EXPECT_NO_THROW((void)make_partition(Box::cube(8), {2, 1, 1}, 4));
}

TEST(Partition, CorrectedFacesFollowPhysicalBoundary) {
  const Partition p(Box::cube(8), {2, 1, 1}, 1);
  const FaceMask left = p.corrected_faces(0, false);
  const FaceMask right = p.corrected_faces(1, false);
  EXPECT_FALSE(left.x);
  EXPECT_TRUE(right.x);  // low face of the grown box is interior
  EXPECT_FALSE(right.y);
  const FaceMask right_b = p.corrected_faces(1, true);
  EXPECT_TRUE(right_b.x && right_b.y && right_b.z);
}

class ExchangeTest : public ::testing::TestWithParam<TransportKind> {};

TEST_P(ExchangeTest, HaloCarriesGlobalIndices) {
  const Box global(8, 4, 4);
  const Partition p(global, {2, 1, 1}, 1);
  FieldVector g(global);
  for (std::size_t n = 0; n < g.size(); ++n) g.data()[n] = static_cast<double>(n);
  auto transport = make_transport(GetParam(), 2);
  transport->enable_trace(true);
  Exchanger ex(p, *transport);
  const auto owned = scatter(p, g).parts;
  const auto ext = ex.exchange(owned);
  for (const auto& r : p.ranks()) {
    ASSERT_EQ(ext[r.rank].box(), r.extended.box);
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < r.extended.box.nz; ++k)
        for (int j = 0; j < r.extended.box.ny; ++j)
          for (int i = 0; i < r.extended.box.nx; ++i) {
            const double want = static_cast<double>(global_index(
                global, c, r.extended.offset[0] + i, r.extended.offset[1] + j, r.extended.offset[2] + k));
            ASSERT_EQ(ext[r.rank].at(c, i, j, k), want);
          }
  }
  EXPECT_EQ(ex.messages_per_exchange(), 2u);
  EXPECT_EQ(transport->bytes_sent(), transport->bytes_received());
  EXPECT_EQ(transport->bytes_sent(), 2u * 3 * 4 * 4 * sizeof(double));
  EXPECT_EQ(transport->pending(), 0u);
  EXPECT_EQ(transport->trace().size(), 2u);
}

TEST_P(ExchangeTest, ConstantFieldStaysConstant) {
  const Box global = Box::cube(8);
  const Partition p(global, {2, 2, 2}, 2);
  FieldVector g(global);
  for (double& v : g.data()) v = 3.5;
  auto transport = make_transport(GetParam(), 8);
  Exchanger ex(p, *transport);
  const auto ext = ex.exchange(scatter(p, g).parts);
  for (const auto& f : ext)
    for (double v : f.data()) ASSERT_EQ(v, 3.5);
  EXPECT_EQ(transport->bytes_sent(), transport->bytes_received());
}

TEST_P(ExchangeTest, ZeroOverlapSendsNothing) {
  const Partition p(Box::cube(8), {2, 2, 2}, 0);
  auto transport = make_transport(GetParam(), 8);
  Exchanger ex(p, *transport);
  const auto ext = ex.exchange(scatter(p, random_field(Box::cube(8), 3)).parts);
  EXPECT_EQ(ex.messages_per_exchange(), 0u);
  EXPECT_EQ(transport->bytes_sent(), 0u);
  for (const auto& r : p.ranks()) EXPECT_EQ(ext[r.rank].box(), r.owned.box);
}

INSTANTIATE_TEST_SUITE_P(Transports, ExchangeTest,
                         ::testing::Values(TransportKind::serial, TransportKind::threads));

TEST(Transport, TraceCsvIsSorted) {
  std::ostringstream os;
  write_transfer_trace(os, {{2, 1, 0, 16}, {1, 1, 0, 8}, {1, 0, 1, 8}});
  EXPECT_EQ(os.str(), "epoch,src_rank,dst_rank,bytes\n1,0,1,8\n1,1,0,8\n2,1,0,16\n");
}

TEST(Transport, MissingMessageThrows) {
  SerialTransport t(2);
  EXPECT_THROW((void)t.receive(0, 1, 99), CommunicationError);
}

TEST(Transport, WorkerExceptionPropagates) {
  ThreadTransport t(3);
  EXPECT_THROW(t.for_each_rank([](int r) {
    if (r == 1) throw std::runtime_error("boom");
  }),
               std::runtime_error);
  int sum = 0;
  std::mutex m;
  t.for_each_rank([&](int r) {
    std::lock_guard lock(m);
    sum += r;
  });
  EXPECT_EQ(sum, 3);
}

TEST(Distributed, ScatterGatherRoundTrip) {
  const Box global(8, 6, 4);
  const Partition p(global, {2, 3, 2}, 0);
  const FieldVector g = random_field(global, 9);
  EXPECT_EQ(gather(p, scatter(p, g)), g);
}

TEST(Distributed, ReduceDotIsLeftToRight) {
  const std::vector<double> partials{1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(reduce_dot(partials), 1.0);
}

TEST(Distributed, DotAndAxpyMatchGlobal) {
  const Box global = Box::cube(8);
  const Partition p(global, {2, 2, 1}, 0);
  SerialTransport t(4);
  DistributedContext ctx(p, t);
  WorkCounts counts;
  ctx.set_sink(&counts);
  const FieldVector a = random_field(global, 1);
  const FieldVector b = random_field(global, 2);
  auto da = scatter(p, a);
  auto db = scatter(p, b);
  const double want = oracle::to_eigen(a.data()).dot(oracle::to_eigen(b.data()));
  EXPECT_NEAR(ctx.dot(da, db), want, 1e-12 * std::abs(want) + 1e-12);
  ctx.axpy(0.5, da, db);
  const Eigen::VectorXd ref = oracle::to_eigen(b.data()) + 0.5 * oracle::to_eigen(a.data());
  EXPECT_LE(oracle::rel_err(oracle::to_eigen(gather(p, db).data()), ref), 1e-15);
  EXPECT_EQ(counts.dot, 1u);
  EXPECT_EQ(counts.axpy, 1u);
}

class OperatorTest : public ::testing::TestWithParam<bool> {};

TEST_P(OperatorTest, DistributedApplyMatchesGlobal) {
  const bool with_boundary = GetParam();
  const Box global(8, 6, 4);
  const Partition p(global, {2, 3, 2}, 0);
  ThreadTransport t(p.size());
  DistributedContext ctx(p, t);
  DistributedOperator op(ctx, 0.3, with_boundary);
  const FieldVector x = random_field(global, 5);
  auto y = ctx.zeros();
  op.apply(scatter(p, x), y);
  const FieldVector want = apply_A(OperatorParams(global, 0.3), with_boundary, x);
  EXPECT_LE(oracle::rel_err(gather(p, y).data(), want.data()), 1e-14);
}

INSTANTIATE_TEST_SUITE_P(Boundary, OperatorTest, ::testing::Bool());

// The locally solved operator equals the restriction of the global one.
TEST(Ras, LocalOperatorIsRestrictionOfGlobal) {
  const Box global = Box::cube(6);
  const double alpha = 0.25;
  for (bool with_boundary : {true, false}) {
    const Eigen::MatrixXd a = oracle::operator_matrix(global, alpha, with_boundary);
    const Partition p(global, {3, 1, 1}, 1);
    for (const auto& r : p.ranks()) {
      if (!with_boundary && r.rank != 1) continue;  // only interior boxes match without Lambda
      const Eigen::MatrixXd s = selection(global, r.extended);
      const Eigen::MatrixXd local = masked_operator(r.extended.box, alpha, p.corrected_faces(r.rank, with_boundary));
      EXPECT_LE((s * a * s.transpose() - local).cwiseAbs().maxCoeff(), 1e-14) << r.rank;
    }
  }
}

TEST(Ras, SingleSubdomainIsExactSolve) {
  const Box global = Box::cube(6);
  const Partition p(global, {1, 1, 1}, 2);
  SerialTransport t(1);
  DistributedContext ctx(p.with_overlap(0), t);
  SolverCache cache;
  RasPreconditioner ras(ctx, p, 0.25, true, cache);
  const FieldVector r = random_field(global, 11);
  auto z = ctx.zeros();
  ras.apply(scatter(p, r), z);
  const FieldVector want = solve(precompute(OperatorParams(global, 0.25)), r);
  EXPECT_LE(oracle::rel_err(gather(p, z).data(), want.data()), 1e-13);
}

TEST(Ras, ZeroInZeroOut) {
  const Partition p(Box::cube(8), {2, 2, 2}, 1);
  SerialTransport t(8);
  DistributedContext ctx(p.with_overlap(0), t);
  SolverCache cache;
  RasPreconditioner ras(ctx, p, 0.25, true, cache);
  auto z = ctx.zeros();
  ctx.fill(z, 7.0);
  ras.apply(ctx.zeros(), z);
  for (const auto& part : z.parts)
    for (double v : part.data()) ASSERT_EQ(v, 0.0);
  EXPECT_LE(cache.size(), 8u);
}

struct RasCase {
  ProcGrid grid;
  int overlap;
  bool with_boundary;
};

class RasOracleTest : public ::testing::TestWithParam<RasCase> {};

TEST_P(RasOracleTest, MatchesDenseRestrictedAdditiveSchwarz) {
  const auto param = GetParam();
  const Box global = Box::cube(8);
  const double alpha = 0.25;
  const Partition p(global, param.grid, param.overlap);
  const Eigen::MatrixXd a = oracle::operator_matrix(global, alpha, param.with_boundary);
  const FieldVector r = random_field(global, 21);
  const Eigen::VectorXd rv = oracle::to_eigen(r.data());

  Eigen::VectorXd want = Eigen::VectorXd::Zero(rv.size());
  for (const auto& rk : p.ranks()) {
    const Eigen::MatrixXd s = selection(global, rk.extended);
    const Eigen::MatrixXd keep = selection(global, rk.owned);
    const Eigen::VectorXd local = (s * a * s.transpose()).partialPivLu().solve(s * rv);
    // owned cells of the extended solution, placed back globally
    const Eigen::VectorXd global_local = s.transpose() * local;
    want += keep.transpose() * (keep * global_local);
  }

  ThreadTransport t(p.size());
  DistributedContext ctx(p.with_overlap(0), t);
  SolverCache cache;
  RasPreconditioner ras(ctx, p, alpha, param.with_boundary, cache);
  auto z = ctx.zeros();
  ras.apply(scatter(p, r), z);
  EXPECT_LE(oracle::rel_err(oracle::to_eigen(gather(p, z).data()), want), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Layouts, RasOracleTest,
                         ::testing::Values(RasCase{{2, 1, 1}, 0, true}, RasCase{{2, 1, 1}, 1, true},
                                           RasCase{{2, 2, 1}, 2, true}, RasCase{{2, 1, 1}, 1, false},
                                           RasCase{{2, 2, 2}, 1, false}));

}  // namespace
}  // namespace flashmp
