#pragma once

// Mean, covariance surfaces and the Gram matrix of a multivariate
// functional sample, with the diagonal noise corrections.

#include "mfpca/fdata.hpp"

namespace mfpca {

/// Covariance between features p and q on the grid points, M_p x M_q.
struct CovarianceSurface {
  Index p = 0;
  Index q = 0;
  Matrix values;
  Index floored = 0;        // corrected diagonal values raised back to 0
  bool degenerate = false;  // fewer than two observations carry weight
};

/// Observation-weighted pointwise mean; masked points renormalize the weights.
MultiFunction mean_estimate(const Dataset& ds);

/// sum_n pi_n (X_n(s) - mu(s)) (X_n(t) - mu(t)) over observations seeing both
/// points (weights renormalized per pair), with `noise_variance` subtracted
/// on the diagonal; negative diagonal values are floored at 0.
CovarianceSurface covariance_estimate(const Dataset& ds, Index p, double noise_variance = 0.0);

/// The same estimator between two features, never corrected.
CovarianceSurface cross_covariance_estimate(const Dataset& ds, Index p, Index q);

struct GramMatrix {
  Matrix values;
  bool corrected = false;
};

/// M_nn' = sqrt(pi_n pi_n') <X_n - mu, X_n' - mu>_w by quadrature. With
/// `correct_diagonal`, M_nn is reduced by pi_n sum_p wbar_p sigma_p^2, where
/// wbar_p is the feature weight (its domain average if pointwise). Masked
/// points raise kMustDensify.
GramMatrix gram_estimate(const Dataset& ds, const FeatureWeights* fw = nullptr,
                         const Vector& noise_variance = Vector(), bool correct_diagonal = false);

/// Centered feature blocks Y_p = X_p - mu_p (dense data only).
std::vector<Matrix> centered_blocks(const Dataset& ds, const MultiFunction& mean);

}  // namespace mfpca
