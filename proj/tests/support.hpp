#pragma once

// Small datasets shared by the unit tests.

#include <cstdint>

#include "mfpca/fdata.hpp"
#include "mfpca/rng.hpp"
#include "mfpca/simulation.hpp"

namespace mfpca::fixtures {

// Random dense two-feature dataset (2D image + curve) with smooth-ish rows.
inline Dataset random_dataset(Index n, std::uint64_t seed, Index rows = 6, Index cols = 5, Index points = 9) {
  CounterRng rng(seed, Stream::kTrial);
  const DomainGrid g1 = DomainGrid::uniform2d(0.0, 1.0, rows, 0.0, 0.5, cols);
  const DomainGrid g2 = DomainGrid::uniform(-1.0, 1.0, points);
  Matrix a(n, g1.size()), b(n, g2.size());
  for (Index i = 0; i < n; ++i) {
    for (Index m = 0; m < a.cols(); ++m) a(i, m) = rng.normal();
    for (Index m = 0; m < b.cols(); ++m) b(i, m) = rng.normal() + 0.5;
  }
  return Dataset({FeatureBlock(g1, a), FeatureBlock(g2, b)});
}

inline Vector random_weights(Index n, std::uint64_t seed) {
  CounterRng rng(seed, Stream::kTrial);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w(i) = rng.uniform(0.2, 1.0);
  return w / w.sum();
}

// Noiseless KL data with the simulation model.
inline Simulated kl_data(Index n, std::uint64_t seed, Index rows = 11, Index cols = 11, Index points = 21,
                         Index k = 25) {
  const KLModel model =
      build_kl_model(k, DomainGrid::uniform2d(0.0, 1.0, rows, 0.0, 0.5, cols), DomainGrid::uniform(-1.0, 1.0, points),
                     AlphaRule{}, seed);
  return simulate(model, n, seed);
}

inline KLModel kl_model(std::uint64_t seed, Index rows = 11, Index cols = 11, Index points = 21, Index k = 25) {
  return build_kl_model(k, DomainGrid::uniform2d(0.0, 1.0, rows, 0.0, 0.5, cols), DomainGrid::uniform(-1.0, 1.0, points),
                        AlphaRule{}, seed);
}

}  // namespace mfpca::fixtures
