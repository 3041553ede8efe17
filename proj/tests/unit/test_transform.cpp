#include <gtest/gtest.h>

#include "dense_oracle.hpp"
#include "flashmp/errors.hpp"
#include "flashmp/random.hpp"
#include "flashmp/subdomain_solver.hpp"
#include "flashmp/transform.hpp"

namespace flashmp {
namespace {

Eigen::MatrixXd dense_G(const TransformSet& ts) {
  const Box& box = ts.box();
  const Eigen::Index v = static_cast<Eigen::Index>(box.volume());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3 * v, 3 * v);
  for (int c = 0; c < 3; ++c) {
    auto factor = [&](Axis a) -> Eigen::MatrixXd {
      const auto& s = ts.axis(a);
      return static_cast<int>(a) == c ? Eigen::MatrixXd(s.U.transpose()) : s.Vt;
    };
    g.block(c * v, c * v, v, v) = oracle::lift(box, factor(Axis::x), factor(Axis::y), factor(Axis::z));
  }
  return g;
}

TEST(AxisSvd, SinglePointGauge) {
  const auto s = svd_of_difference(1);
  EXPECT_DOUBLE_EQ(s.S(0), 1.0);
  EXPECT_DOUBLE_EQ(s.U(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(s.Vt(0, 0), 1.0);
}

TEST(AxisSvd, SingularValuesMatchEigenvaluesOfNormalMatrix) {
  // Independent route: sigma^2 are the eigenvalues of D^T D.
  const auto s = svd_of_difference(4);
  const Eigen::MatrixXd d = oracle::forward_1d(4);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.transpose() * d);
  Eigen::VectorXd want = eig.eigenvalues().cwiseSqrt().reverse();
  EXPECT_LE((s.S - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AxisSvd, FactorInvariantsUpTo32) {
  for (int n = 1; n <= 32; ++n) {
    const auto s = svd_of_difference(n);
    const Eigen::MatrixXd d = oracle::forward_1d(n);
    EXPECT_LE((s.U * s.S.asDiagonal() * s.Vt - d).norm(), 1e-12 * d.norm()) << n;
    EXPECT_LE((s.U.transpose() * s.U - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((s.Vt * s.Vt.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(s.S.minCoeff(), 0.0);
    for (int i = 1; i < n; ++i) EXPECT_GE(s.S(i - 1), s.S(i));
    for (int c = 0; c < n; ++c) {
      int r = 0;
      while (std::abs(s.Vt(c, r)) < 1e-14) ++r;
      EXPECT_GT(s.Vt(c, r), 0.0);
    }
  }
}

TEST(AxisSvd, CacheReturnsSharedInstance) {
  EXPECT_EQ(cached_svd_of_difference(7).get(), cached_svd_of_difference(7).get());
}

TEST(ContractAxis, IdentityLeavesGridUnchanged) {
  const Box box(3, 4, 2);
  const auto f = random_values(box.volume(), 1);
  for (Axis a : kAxes) {
    const int n = box.extent(a);
    EXPECT_EQ(contract_axis(a, Eigen::MatrixXd::Identity(n, n), box, f), f);
  }
}

TEST(ContractAxis, ForwardDifferenceAlongX) {
  const Box box(4, 3, 2);
  const auto f = random_values(box.volume(), 2);
  const auto out = contract_axis(Axis::x, oracle::forward_1d(4), box, f);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 4; ++i) {
        const double next = i + 1 < 4 ? f[box.point(i + 1, j, k)] : 0.0;
        EXPECT_DOUBLE_EQ(out[box.point(i, j, k)], next - f[box.point(i, j, k)]);
      }
}

TEST(ContractAxis, MatchesNaiveSummation) {
  for (const Box& box : {Box(2, 2, 2), Box(3, 5, 4), Box(1, 6, 2)}) {
    const auto f = random_values(box.volume(), 3);
    for (Axis a : kAxes) {
      const int n = box.extent(a);
      const Eigen::MatrixXd t = Eigen::MatrixXd::Random(n, n);
      const auto got = contract_axis(a, t, box, f);
      const auto want = contract_axis_naive(a, t, box, f);
      EXPECT_LE(oracle::rel_err(got, want), 1e-14);
    }
  }
}

TEST(ContractAxis, RejectsDimensionMismatch) {
  const Box box(3, 3, 3);
  EXPECT_THROW((void)contract_axis(Axis::y, Eigen::MatrixXd::Identity(2, 2), box,
                                   std::vector<double>(27)),
               DimensionError);
}

TEST(ContractAxis, BackwardAfterForwardComposes) {
  const Box box(4, 3, 5);
  const auto f = random_values(box.volume(), 4);
  for (Axis a : kAxes) {
    const int n = box.extent(a);
    const auto once = contract_axis(a, oracle::forward_1d(n), box, f);
    const auto twice = contract_axis(a, -oracle::forward_1d(n).transpose(), box, once);
    const Eigen::MatrixXd db_df = oracle::backward_1d(n) * oracle::forward_1d(n);
    EXPECT_LE(oracle::rel_err(twice, contract_axis_naive(a, db_df, box, f)), 1e-14);
  }
}

TEST(TransformG, IdentityFactorsLeaveFieldUnchanged) {
  const Box box(2, 3, 2);
  auto ident = [](int n) {
    return std::make_shared<const AxisSvd>(AxisSvd{n, Eigen::MatrixXd::Identity(n, n),
                                                   Eigen::VectorXd::Ones(n),
                                                   Eigen::MatrixXd::Identity(n, n)});
  };
  const TransformSet ts(box, ident(2), ident(3), ident(2));
  const auto e = random_field(box, 5);
  EXPECT_EQ(apply_G(ts, e), e);
  EXPECT_EQ(apply_G_inverse(ts, e), e);
}

TEST(TransformG, RoundTrip) {
  for (const Box& box : {Box(3, 3, 3), Box(2, 5, 4), Box(6, 6, 6)}) {
    const auto ts = TransformSet::for_box(box);
    const auto e = random_field(box, 6);
    EXPECT_LE(oracle::rel_err(apply_G_inverse(ts, apply_G(ts, e)).data(), e.data()), 1e-12);
    EXPECT_LE(oracle::rel_err(apply_G(ts, apply_G_inverse(ts, e)).data(), e.data()), 1e-12);
  }
  const Box box(3, 2, 2);
  EXPECT_EQ(apply_G_inverse(TransformSet::for_box(box), FieldVector(box)), FieldVector(box));
}

TEST(TransformG, MatchesDenseKroneckerOperator) {
  const Box box(3, 3, 3);
  const auto ts = TransformSet::for_box(box);
  const auto e = random_field(box, 8);
  const Eigen::MatrixXd g = dense_G(ts);
  EXPECT_LE(oracle::rel_err(oracle::to_eigen(apply_G(ts, e).data()), g * oracle::to_eigen(e.data())), 1e-13);
}

TEST(TransformG, InverseMatchesDenseInverse) {
  const Box box(2, 3, 4);
  const auto ts = TransformSet::for_box(box);
  const auto e = random_field(box, 9);
  const Eigen::MatrixXd ginv = dense_G(ts).inverse();
  EXPECT_LE(oracle::rel_err(oracle::to_eigen(apply_G_inverse(ts, e).data()),
                            ginv * oracle::to_eigen(e.data())),
            1e-12);
}

// The transformed double-curl operator must be point-wise 3x3 block diagonal
// with blocks I + alpha(|s|^2 I - s s^T).
TEST(TransformG, DiagonalizesTheOperator) {
  for (const Box& box : {Box(2, 2, 2), Box(3, 3, 3), Box(2, 3, 4), Box(4, 4, 4)}) {
    for (double alpha : {0.05, 0.25, 1.0}) {
      const auto ts = TransformSet::for_box(box);
      const Eigen::MatrixXd a = oracle::operator_matrix(box, alpha, false);
      const Eigen::MatrixXd g = dense_G(ts);
      const Eigen::MatrixXd p = oracle::permutation(box);
      const Eigen::MatrixXd h = p * g * a * g.transpose() * p.transpose();
      const double scale = a.norm();
      double off = 0.0;
      double block_err = 0.0;
      for (int k = 0; k < box.nz; ++k)
        for (int j = 0; j < box.ny; ++j)
          for (int i = 0; i < box.nx; ++i) {
            const auto q = static_cast<Eigen::Index>(box.point(i, j, k));
            const Eigen::Matrix3d blk = h.block(3 * q, 3 * q, 3, 3);
            const Eigen::Matrix3d want = point_block(alpha, ts.axis(Axis::x).S(i),
                                                     ts.axis(Axis::y).S(j), ts.axis(Axis::z).S(k));
            block_err = std::max(block_err, (blk - want).cwiseAbs().maxCoeff());
          }
      for (Eigen::Index r = 0; r < h.rows(); ++r)
        for (Eigen::Index c = 0; c < h.cols(); ++c)
          if (r / 3 != c / 3) off = std::max(off, std::abs(h(r, c)));
      EXPECT_LE(off, 1e-10 * scale);
      EXPECT_LE(block_err, 1e-10 * scale);
    }
  }
}

}  // namespace
}  // namespace flashmp
