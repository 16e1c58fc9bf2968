#pragma once

// Synthetic multivariate functional data from a truncated Karhunen-Loeve
// expansion: a 2D image feature built from tensor-product Fourier functions
// and a 1D curve feature built from Legendre polynomials.

#include <cstdint>
#include <utility>

#include "mfpca/fdata.hpp"

namespace mfpca {

/// (l, m) per-axis Fourier indices (1-based) of tensor component k (0-based).
/// Enumeration by shells of max(l, m): (1,1), (1,2), (2,1), (2,2), (1,3),
/// (3,1), (2,3), (3,2), (3,3), ...
std::pair<Index, Index> fourier_pair(Index k);

/// Orthonormal Fourier function j (1-based: constant, then sin/cos pairs) on
/// [lo, hi] evaluated at `x`.
Vector fourier_function(Index j, const Vector& x, double lo, double hi);

/// First K tensor-product Fourier images on a 2-axis grid, K x M. Throws
/// kAliasing when a needed frequency is not resolved by the grid.
Matrix fourier_tensor_basis(Index count, const DomainGrid& grid);

enum class LegendreNormalization {
  kAnalytic,    // sqrt((2k-1)/|T|) P_{k-1}, orthonormal in L2
  kQuadrature,  // the analytic family re-orthonormalized (Gram-Schmidt in
                // the trapezoid inner product); needs K <= M
};

/// First K orthonormal Legendre functions on a 1-axis grid, K x M.
Matrix legendre_basis(Index count, const DomainGrid& grid,
                      LegendreNormalization norm = LegendreNormalization::kAnalytic);

/// lambda_k = exp(-(k + 1) / 2), k = 1..K.
Vector kl_eigenvalues(Index count);

struct AlphaRule {
  enum class Kind { kUniformPerComponent, kUniformShared, kFixed };
  Kind kind = Kind::kUniformPerComponent;
  double lo = 0.2;
  double hi = 0.8;
  double value = 0.5;

  static AlphaRule fixed(double a) { return {Kind::kFixed, 0.2, 0.8, a}; }
};

struct KLModel {
  std::vector<DomainGrid> grids;
  std::vector<Matrix> eigenfunctions;  // per feature, K x M_p
  Vector eigenvalues;
  Vector alpha;
  MultiFunction mean;
  bool quadrature_orthonormal = false;  // curve family re-orthonormalized

  Index n_components() const { return eigenvalues.size(); }
  MultiFunction eigenfunction(Index k) const;
};

/// phi_k = (alpha_k^{1/2} image_k, (1 - alpha_k)^{1/2} curve_k). The curve
/// family is quadrature-orthonormalized whenever K <= M of the curve grid.
KLModel build_kl_model(Index count, const DomainGrid& image_grid, const DomainGrid& curve_grid,
                       const AlphaRule& alpha_rule, std::uint64_t seed);

struct Simulated {
  Dataset data;
  Matrix scores;  // N x K
};

/// Scores N(0, lambda_k) from the kScores stream; pi_n = 1/N.
Simulated simulate(const KLModel& model, Index n_obs, std::uint64_t seed);
Dataset simulate_from_scores(const KLModel& model, const Matrix& scores);

struct NoiseSpec {
  Vector variance;  // one sigma_p^2 per feature
};

/// Adds N(0, sigma_p^2) at every observed point (kNoise stream).
Dataset add_noise(const Dataset& ds, const NoiseSpec& spec, std::uint64_t seed);

struct SparsityRegime {
  double min_missing = 0.0;
  double max_missing = 0.0;

  static SparsityRegime medium() { return {0.5, 0.7}; }
  static SparsityRegime high() { return {0.9, 0.95}; }
};

/// Masks a uniformly drawn fraction of each curve's points (kMask stream).
/// Two anchor points differing on every axis are always kept; a regime
/// that would leave fewer than 2 points raises kSparsify.
Dataset sparsify(const Dataset& ds, const SparsityRegime& regime, std::uint64_t seed);

}  // namespace mfpca
