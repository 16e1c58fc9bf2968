#pragma once

// The fitted multivariate eigen-decomposition shared by every pathway.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfpca/fdata.hpp"

namespace mfpca {

enum class Pathway { kGram, kCovariance, kBasis };

const char* to_string(Pathway p) noexcept;
Pathway parse_pathway(const std::string& name);

struct MfpcaModel {
  Pathway pathway = Pathway::kGram;
  std::vector<DomainGrid> grids;
  Vector eigenvalues;                  // nonincreasing
  std::vector<Matrix> eigenfunctions;  // per feature, K x M_p
  Matrix scores;                       // N x K
  MultiFunction mean;
  Vector explained;                    // lambda_k / sum of all nonzero eigenvalues
  /// Feature weights of the fit; eigenfunctions are then orthonormal in <.,.>_w.
  std::optional<FeatureWeights> feature_weights;
  /// Eigenvalue index ranges with relative gaps below 1e-9.
  std::vector<std::pair<Index, Index>> degenerate;
  double clamped_mass = 0.0;  // negative eigenvalue mass set to zero
  Index rank = 0;             // numerical rank of the decomposed matrix

  Index n_components() const { return eigenvalues.size(); }
  Index n_obs() const { return scores.rows(); }
  MultiFunction eigenfunction(Index k) const;
};

/// Smallest K whose cumulative share of sum(values) reaches `threshold`.
Index select_components(const Vector& values, double threshold);

/// X_n = mu + sum_{k < K} c_nk phi_k on the model grids.
Dataset reconstruct(const MfpcaModel& model, Index count);

/// Flips each component so its largest-magnitude grid value is positive.
void apply_sign_convention(MfpcaModel& model);

/// How many components to keep: an explicit count, else the variance
/// threshold. Both are capped by `available`.
struct ComponentRequest {
  Index count = 0;          // 0 = use threshold
  double threshold = 1.0;   // cumulative variance share

  Index resolve(const Vector& positive_values, Index available) const;
};

/// Per-point sqrt(w_p) of a feature (ones without weights).
Vector sqrt_weight(const FeatureWeights* fw, Index p, const DomainGrid& grid);

}  // namespace mfpca
