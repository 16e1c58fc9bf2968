#include <gtest/gtest.h>

#include <cmath>

#include "mfpca/fdata.hpp"
#include "support.hpp"

using namespace mfpca;

TEST(DomainGrid, RejectsTooFewOrUnorderedPoints) {
  EXPECT_THROW(DomainGrid({Vector::Constant(1, 0.0)}), Error);
  Vector v(3);
  v << 0.0, 0.5, 0.5;
  try {
    DomainGrid g({v});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateGrid);
  }
}

TEST(DomainGrid, FlattensRowMajor) {
  const DomainGrid g = DomainGrid::uniform2d(0.0, 1.0, 3, 0.0, 0.5, 2);
  EXPECT_EQ(g.size(), 6);
  EXPECT_DOUBLE_EQ(g.coordinate(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(g.coordinate(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(g.coordinate(2, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.volume(), 0.5);
}

TEST(Quadrature, TrapezoidWeightsSumToVolume) {
  const DomainGrid g = DomainGrid::uniform2d(0.0, 1.0, 7, 0.0, 0.5, 4);
  EXPECT_NEAR(g.quadrature().sum(), 0.5, 1e-15);
  Vector x(4);
  x << 0.0, 0.1, 0.4, 1.0;
  const Vector w = trapezoid_weights(x);
  EXPECT_NEAR(w(0), 0.05, 1e-15);
  EXPECT_NEAR(w(1), 0.2, 1e-15);
  EXPECT_NEAR(w(3), 0.3, 1e-15);
}

TEST(Quadrature, IntegratesLinearFunctionsExactly) {
  const DomainGrid g = DomainGrid::uniform2d(0.0, 2.0, 5, -1.0, 3.0, 9);
  Vector f(g.size());
  for (Index i = 0; i < g.size(); ++i) f(i) = 1.0 + 2.0 * g.coordinate(i, 0) - g.coordinate(i, 1);
  // integral of 1 + 2s - t over [0,2]x[-1,3] = 8 + 16 - 8 = 16
  EXPECT_NEAR(g.quadrature().dot(f), 16.0, 1e-12);
}

TEST(Dataset, ValidatesWeights) {
  const Dataset ds = fixtures::random_dataset(4, 1);
  EXPECT_NEAR(ds.obs_weights().sum(), 1.0, 1e-15);
  EXPECT_THROW(ds.with_obs_weights(Vector::Constant(4, 0.3)), Error);
  Vector bad(4);
  bad << 0.5, 0.5, 0.5, -0.5;
  EXPECT_THROW(ds.with_obs_weights(bad), Error);
}

TEST(Dataset, ShapeMismatchIsReported) {
  const DomainGrid g = DomainGrid::uniform(0.0, 1.0, 5);
  try {
    FeatureBlock b(g, Matrix::Zero(3, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeMismatch);
  }
}

TEST(InnerProduct, SymmetricAndBilinear) {
  const Dataset ds = fixtures::random_dataset(3, 2);
  const MultiFunction f = ds.observation(0), g = ds.observation(1), h = ds.observation(2);
  const auto& grids = ds.grids();
  EXPECT_NEAR(inner_product_h(grids, f, g), inner_product_h(grids, g, f), 1e-14);
  MultiFunction combo = f;
  for (std::size_t p = 0; p < combo.size(); ++p) combo[p] = 2.0 * f[p] - 3.0 * h[p];
  EXPECT_NEAR(inner_product_h(grids, combo, g),
              2.0 * inner_product_h(grids, f, g) - 3.0 * inner_product_h(grids, h, g), 1e-12);
}

TEST(WeightedMean, SingleObservationAndAntipodalPair) {
  const Dataset one = fixtures::random_dataset(1, 3);
  const MultiFunction mu = weighted_mean(one);
  EXPECT_TRUE(mu[0].isApprox(one.feature(0).values().row(0).transpose()));

  const Dataset base = fixtures::random_dataset(1, 4);
  std::vector<FeatureBlock> blocks;
  for (const FeatureBlock& f : base.features()) {
    Matrix v(2, f.grid().size());
    v.row(0) = f.values().row(0);
    v.row(1) = -f.values().row(0);
    blocks.emplace_back(f.grid(), v);
  }
  const MultiFunction zero = weighted_mean(Dataset(blocks));
  for (const Vector& v : zero) EXPECT_LT(v.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(WeightedMean, MaskedPointsRenormalize) {
  const DomainGrid g = DomainGrid::uniform(0.0, 1.0, 3);
  Matrix v(2, 3);
  v << 1.0, 2.0, 3.0, 5.0, 7.0, 9.0;
  Mask m(2, 3);
  m << true, false, true, true, true, true;
  const MultiFunction mu = weighted_mean(Dataset({FeatureBlock(g, v, m)}));
  EXPECT_DOUBLE_EQ(mu[0](0), 3.0);
  EXPECT_DOUBLE_EQ(mu[0](1), 7.0);

  Mask none(2, 3);
  none << true, false, true, true, false, true;
  try {
    weighted_mean(Dataset({FeatureBlock(g, v, none)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyObservation);
  }
}

TEST(Standardization, IntegratedVarianceGivesUnitInertiaPerFeature) {
  const Dataset ds = fixtures::random_dataset(8, 5);
  const FeatureWeights fw = standardization_weights(ds, StandardizationScheme::kIntegratedVariance);
  const Dataset r = rescale(ds, fw);
  for (Index p = 0; p < r.n_features(); ++p) {
    const Matrix& y = r.feature(p).values();
    const double inertia = (ds.obs_weights().asDiagonal() * y.cwiseAbs2() * r.feature(p).grid().quadrature()).sum();
    EXPECT_NEAR(inertia, 1.0, 1e-12);
  }
}

TEST(Standardization, PointwiseSdGivesUnitVariance) {
  const Dataset ds = fixtures::random_dataset(8, 6);
  const Dataset r = rescale(ds, standardization_weights(ds, StandardizationScheme::kPointwiseSd));
  for (Index p = 0; p < r.n_features(); ++p) {
    const Vector var = r.feature(p).values().cwiseAbs2().transpose() * ds.obs_weights();
    EXPECT_LT((var.array() - 1.0).abs().maxCoeff(), 1e-12);
  }
}

TEST(Standardization, ZeroVarianceFeatureIsDegenerate) {
  const DomainGrid g = DomainGrid::uniform(0.0, 1.0, 4);
  Dataset ds({FeatureBlock(g, Matrix::Ones(3, 4))});
  try {
    standardization_weights(ds, StandardizationScheme::kIntegratedVariance);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateFeature);
  }
}
