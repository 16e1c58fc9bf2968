#pragma once

// MFPCA through the eigendecomposition of the N x N Gram matrix of the
// centered observations, for general observation weights.

#include <optional>

#include "mfpca/model.hpp"

namespace mfpca {

struct GramOptions {
  ComponentRequest components;
  std::optional<FeatureWeights> weights;
  Vector noise_variance;  // one per feature; used with correct_diagonal
  bool correct_diagonal = false;
};

/// With (l_k, u_k) the eigenpairs of M:
///   lambda_k = l_k,
///   phi_k    = l_k^{-1/2} sum_n sqrt(pi_n) u_kn (X_n - mu),
///   c_nk     = sqrt(l_k / pi_n) u_kn.
/// Components at or below the rank tolerance are dropped. Data must be dense.
MfpcaModel gram_mfpca(const Dataset& ds, const GramOptions& options = {});

}  // namespace mfpca
