#include <gtest/gtest.h>

#include <cmath>

#include "mfpca/metrics.hpp"
#include "mfpca/mfpca_gram.hpp"
#include "support.hpp"

using namespace mfpca;

namespace {

const std::vector<DomainGrid> kGrid{DomainGrid::uniform(0.0, 1.0, 5)};

MultiFunction fn(double a, double b, double c, double d, double e) {
  Vector v(5);
  v << a, b, c, d, e;
  return {v};
}

}  // namespace

TEST(Metrics, IseIsSignInvariant) {
  const MultiFunction phi = fn(1, 2, 3, 2, 1);
  const MultiFunction neg = fn(-1, -2, -3, -2, -1);
  EXPECT_EQ(ise(kGrid, phi, phi), 0.0);
  EXPECT_EQ(ise(kGrid, phi, neg), 0.0);
  // Trapezoid weights 1/8, 1/4, 1/4, 1/4, 1/8 on a unit shift.
  EXPECT_NEAR(ise(kGrid, phi, fn(2, 3, 4, 3, 2)), 1.0, 1e-15);
}

TEST(Metrics, RseOverCommonLength) {
  Vector a(3), b(2);
  a << 2.0, 1.0, 0.5;
  b << 1.0, 1.5;
  const Vector r = rse(a, b);
  ASSERT_EQ(r.size(), 2);
  EXPECT_DOUBLE_EQ(r(0), 0.25);
  EXPECT_DOUBLE_EQ(r(1), 0.25);
}

TEST(Metrics, MrseOfIdenticalDataIsZeroAndScalesQuadratically) {
  const Dataset ds = fixtures::random_dataset(4, 71);
  EXPECT_EQ(mrse(ds, ds), 0.0);
  std::vector<FeatureBlock> shifted;
  for (const FeatureBlock& b : ds.features()) shifted.emplace_back(b.grid(), (b.values().array() + 0.5).matrix());
  // Domain volumes are 0.5 and 2, so a shift of 0.5 costs 0.25 * 2.5.
  EXPECT_NEAR(mrse(ds, Dataset(shifted)), 0.625, 1e-12);
}

TEST(Metrics, SubspaceDistanceIgnoresRotationWithinSpan) {
  const MfpcaModel m = gram_mfpca(fixtures::random_dataset(10, 72));
  const MultiFunction a = m.eigenfunction(0), b = m.eigenfunction(1), c = m.eigenfunction(2);
  std::vector<MultiFunction> rotated(2);
  const double t = 0.7;
  for (std::size_t p = 0; p < a.size(); ++p) {
    rotated[0].push_back(std::cos(t) * a[p] + std::sin(t) * b[p]);
    rotated[1].push_back(-std::sin(t) * a[p] + 2.0 * std::cos(t) * b[p]);
  }
  EXPECT_NEAR(subspace_distance(m.grids, {a, b}, rotated), 0.0, 1e-10);
  EXPECT_NEAR(subspace_distance(m.grids, {a, b}, {a, c}), 2.0, 1e-10);
  EXPECT_NEAR(subspace_distance(m.grids, {a}, {a, c}), 1.0, 1e-10);
}
