#include <gtest/gtest.h>

#include "mfpca/linalg.hpp"
#include "mfpca/rng.hpp"

using namespace mfpca;

namespace {

Matrix random_symmetric(Index n, std::uint64_t seed) {
  CounterRng rng(seed, Stream::kTrial);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST(SymmetricEigen, Identity) {
  const EigenSystem es = symmetric_eigen(Matrix::Identity(3, 3));
  EXPECT_TRUE(es.values.isApprox(Vector::Ones(3)));
  EXPECT_EQ(es.rank, 3);
}

TEST(SymmetricEigen, DiagonalSortedDescending) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  const EigenSystem es = symmetric_eigen(d);
  EXPECT_DOUBLE_EQ(es.values(0), 3.0);
  EXPECT_DOUBLE_EQ(es.values(1), 1.0);
  EXPECT_NEAR(std::abs(es.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(0, 1)), 1.0, 1e-15);
}

TEST(SymmetricEigen, ReconstructsPsdMatrixAndVectorsAreOrthonormal) {
  const Matrix a = random_symmetric(6, 1);
  const Matrix m = a * a.transpose();
  const EigenSystem es = symmetric_eigen(m);
  EXPECT_LT((m - es.vectors * es.values.asDiagonal() * es.vectors.transpose()).norm(), 1e-10);
  EXPECT_LT((es.vectors.transpose() * es.vectors - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
  for (Index i = 1; i < 6; ++i) EXPECT_GE(es.values(i - 1), es.values(i));
}

TEST(SymmetricEigen, ClampsNegativeEigenvaluesAndReportsMass) {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 2.0, -0.5, 1.0;
  const EigenSystem es = symmetric_eigen(d);
  EXPECT_DOUBLE_EQ(es.values(2), 0.0);
  EXPECT_DOUBLE_EQ(es.clamped_mass, 0.5);
  EXPECT_EQ(es.rank, 2);
}

TEST(SymmetricEigen, RankToleranceScalesWithSizeAndTopEigenvalue) {
  Matrix d = Matrix::Zero(4, 4);
  d.diagonal() << 10.0, 1.0, 1e-15, 0.0;
  const EigenSystem es = symmetric_eigen(d);
  EXPECT_DOUBLE_EQ(es.rank_tolerance, 4 * std::numeric_limits<double>::epsilon() * 10.0);
  EXPECT_EQ(es.rank, 2);
}

TEST(SymmetricEigen, LeadingMatchesFull) {
  const Matrix a = random_symmetric(30, 2);
  const Matrix m = a * a.transpose();
  const EigenSystem full = symmetric_eigen(m);
  const EigenSystem lead = symmetric_eigen_leading(m, 5);
  ASSERT_EQ(lead.values.size(), 5);
  for (Index k = 0; k < 5; ++k) {
    EXPECT_NEAR(lead.values(k), full.values(k), 1e-10 * full.values(0));
    EXPECT_NEAR(std::abs(lead.vectors.col(k).dot(full.vectors.col(k))), 1.0, 1e-8);
  }
}

TEST(SymmetricSqrt, SquaresBackAndRejectsIndefinite) {
  const Matrix a = random_symmetric(5, 3);
  const Matrix w = a * a.transpose() + Matrix::Identity(5, 5);
  const Matrix r = symmetric_sqrt(w);
  EXPECT_LT((r * r - w).norm(), 1e-12 * w.norm());
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  try {
    symmetric_sqrt(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBasisDegeneracy);
  }
}

TEST(DegenerateBlocks, GroupsNearTies) {
  Vector v(5);
  v << 3.0, 2.0, 2.0 * (1 + 1e-12), 1.0, 0.5;
  const auto blocks = degenerate_blocks(v);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].first, 1);
  EXPECT_EQ(blocks[0].second, 2);
}
