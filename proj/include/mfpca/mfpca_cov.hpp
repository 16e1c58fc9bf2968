#pragma once

// MFPCA through univariate FPCA of each feature followed by an eigenanalysis
// of the covariance of the concatenated univariate scores.

#include <optional>
#include <vector>

#include "mfpca/model.hpp"

namespace mfpca {

struct UnivariateFpca {
  Index feature = 0;
  Matrix eigenfunctions;  // K_p x M_p, orthonormal in L2 under quadrature
  Vector eigenvalues;
  Matrix scores;          // N x K_p
  Index rank = 0;
};

/// Eigenpairs of Q^{1/2} C_pp Q^{1/2} (any number of axes, vectorized grid);
/// phi = Q^{-1/2} v and scores by quadrature. `count` <= 0 keeps every
/// component above the rank tolerance. Data must be dense.
UnivariateFpca univariate_fpca(const Dataset& ds, Index p, Index count, double noise_variance = 0.0);

enum class ScoreDivisor {
  kNMinusOne,  // Z = (N - 1)^{-1} S'S
  kWeighted,   // Z = S' diag(pi) S, the convention of the Gram pathway
};

struct CovOptions {
  /// Univariate components per feature; empty means 20 for 2-axis and 15
  /// for 1-axis grids, and entries <= 0 keep the full univariate rank.
  std::vector<Index> univariate_counts;
  ComponentRequest components;
  ScoreDivisor divisor = ScoreDivisor::kNMinusOne;
  std::optional<FeatureWeights> weights;
  Vector noise_variance;  // diagonal correction of the univariate covariances
};

MfpcaModel cov_mfpca(const Dataset& ds, const CovOptions& options = {});

}  // namespace mfpca
