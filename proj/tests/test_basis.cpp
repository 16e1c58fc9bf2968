#include <gtest/gtest.h>

#include <cmath>

#include "mfpca/mfpca_basis.hpp"
#include "mfpca/mfpca_gram.hpp"
#include "mfpca/moments.hpp"
#include "support.hpp"

using namespace mfpca;

namespace {

BasisSystem small_basis() {
  const DomainGrid g1 = DomainGrid::uniform2d(0.0, 1.0, 6, 0.0, 0.5, 5);
  const DomainGrid g2 = DomainGrid::uniform(-1.0, 1.0, 9);
  return BasisSystem{{g1, g2}, {fourier_tensor_basis(4, g1), legendre_basis(5, g2, LegendreNormalization::kQuadrature)}};
}

CoefficientMatrix random_coefficients(Index n, std::uint64_t seed) {
  CounterRng rng(seed, Stream::kTrial);
  CoefficientMatrix c;
  c.block_sizes = {4, 5};
  c.values.resize(n, 9);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < 9; ++k) c.values(i, k) = rng.normal() / double(k + 1);
  }
  return c;
}

}  // namespace

TEST(BasisGram, ConstantFunctionOnLengthTwoDomain) {
  const DomainGrid g = DomainGrid::uniform(0.0, 2.0, 5);
  const Matrix w = basis_gram_W(BasisSystem{{g}, {Matrix::Ones(1, 5)}});
  ASSERT_EQ(w.rows(), 1);
  EXPECT_NEAR(w(0, 0), 2.0, 1e-15);
}

TEST(BasisGram, QuadratureOrthonormalBasisGivesIdentity) {
  const Matrix w = basis_gram_W(small_basis());
  EXPECT_LT((w.bottomRightCorner(5, 5) - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(w.topRightCorner(4, 5).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((w - w.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BasisCoefficients, ExactExpansionIsRecovered) {
  const BasisSystem basis = small_basis();
  const CoefficientMatrix c = random_coefficients(7, 41);
  const Dataset ds = evaluate_coefficients(c, basis, Vector::Constant(7, 1.0 / 7.0));
  const CoefficientMatrix fit = fit_coefficients(ds, basis);
  EXPECT_LT((fit.values - c.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BasisCoefficients, RankDeficientBasisGivesMinimumNormFit) {
  const DomainGrid g = DomainGrid::uniform(0.0, 1.0, 3);
  Matrix psi(4, 3);
  psi << 1, 1, 1, 0, 1, 2, 1, 2, 3, 2, 2, 2;  // rank 2 on three points
  Matrix x(1, 3);
  x << 1.0, 2.0, 3.0;
  const CoefficientMatrix c = fit_coefficients(Dataset({FeatureBlock(g, x)}), BasisSystem{{g}, {psi}});
  EXPECT_LT((c.values * psi - x).cwiseAbs().maxCoeff(), 1e-12);
  // The minimum-norm solution is orthogonal to the null space of the
  // weighted design.
  const Vector sq = g.quadrature().cwiseSqrt();
  const Matrix design = sq.asDiagonal() * psi.transpose();
  const Eigen::FullPivLU<Matrix> lu(design);
  EXPECT_LT((c.values * lu.kernel()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BasisPathway, FactorReproducesGramMatrix) {
  const BasisSystem basis = small_basis();
  const Vector pi = fixtures::random_weights(8, 42);
  const CoefficientMatrix c = random_coefficients(8, 42);
  const Matrix a = build_A(c, basis_gram_W(basis), pi);
  const Matrix m = gram_estimate(evaluate_coefficients(c, basis, pi)).values;
  EXPECT_LT((a * a.transpose() - m).cwiseAbs().maxCoeff(), 1e-12 * m.cwiseAbs().maxCoeff());
}

TEST(BasisPathway, BothSidesAgreeAndMatchGramPathway) {
  const BasisSystem basis = small_basis();
  const Vector pi = fixtures::random_weights(12, 43);
  const CoefficientMatrix c = random_coefficients(12, 43);
  BasisOptions gram_side, cov_side;
  cov_side.side = BasisSide::kCovariance;
  const BasisModel a = basis_mfpca_detail(c, basis, pi, gram_side);
  const BasisModel b = basis_mfpca_detail(c, basis, pi, cov_side);
  const MfpcaModel g = gram_mfpca(evaluate_coefficients(c, basis, pi));
  ASSERT_EQ(a.model.n_components(), 9);
  ASSERT_EQ(b.model.n_components(), 9);
  ASSERT_EQ(g.n_components(), 9);
  const double l1 = a.model.eigenvalues(0);
  EXPECT_LT((a.model.eigenvalues - b.model.eigenvalues).cwiseAbs().maxCoeff(), 1e-12 * l1);
  EXPECT_LT((a.model.eigenvalues - g.eigenvalues).cwiseAbs().maxCoeff(), 1e-12 * l1);
  for (Index p = 0; p < 2; ++p) {
    EXPECT_LT((a.model.eigenfunctions[p] - b.model.eigenfunctions[p]).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((a.model.eigenfunctions[p] - g.eigenfunctions[p]).cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_LT((a.coefficients - b.coefficients).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((a.model.scores - g.scores).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(BasisPathway, CoefficientsAreWOrthonormalAndSolveEigenproblem) {
  const BasisSystem basis = small_basis();
  const Vector pi = Vector::Constant(15, 1.0 / 15.0);
  const CoefficientMatrix c = random_coefficients(15, 44);
  const BasisModel m = basis_mfpca_detail(c, basis, pi);
  const Matrix w = basis_gram_W(basis);
  const Matrix bwb = m.coefficients * w * m.coefficients.transpose();
  EXPECT_LT((bwb - Matrix::Identity(bwb.rows(), bwb.cols())).cwiseAbs().maxCoeff(), 1e-10);
  // Sigma_C W b = lambda b with Sigma_C the weighted covariance of the coefficients.
  const Vector mean = c.values.transpose() * pi;
  const Matrix centered = c.values.rowwise() - mean.transpose();
  const Matrix sigma = centered.transpose() * pi.asDiagonal() * centered;
  for (Index k = 0; k < m.model.n_components(); ++k) {
    const Vector b = m.coefficients.row(k).transpose();
    EXPECT_LT((sigma * w * b - m.model.eigenvalues(k) * b).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BasisPathway, ConstantCoefficientsGiveZeroFactor) {
  const BasisSystem basis = small_basis();
  CoefficientMatrix c = random_coefficients(1, 45);
  c.values = c.values.replicate(6, 1).eval();
  const Matrix a = build_A(c, basis_gram_W(basis), Vector::Constant(6, 1.0 / 6.0));
  EXPECT_LT(a.cwiseAbs().maxCoeff(), 1e-14);
  const MfpcaModel m = basis_mfpca(c, basis, Vector::Constant(6, 1.0 / 6.0));
  if (m.n_components() > 0) {
    EXPECT_LT(m.eigenvalues(0), 1e-28);
  }
}

TEST(BasisPathway, ShapeErrorsAreReported) {
  const BasisSystem basis = small_basis();
  CoefficientMatrix c = random_coefficients(4, 46);
  EXPECT_THROW(build_A(c, Matrix::Identity(3, 3), Vector::Constant(4, 0.25)), Error);
  BasisSystem bad = basis;
  bad.functions[1] = Matrix::Ones(2, 4);
  EXPECT_THROW(basis_gram_W(bad), Error);
}
