#pragma once

// MFPCA of data expanded in a per-feature basis: coefficients C, the basis
// Gram matrix W and the factor A with M = AA'.

#include <vector>

#include "mfpca/model.hpp"

namespace mfpca {

/// Per feature, K_p basis functions evaluated on the feature grid (K_p x M_p).
struct BasisSystem {
  std::vector<DomainGrid> grids;
  std::vector<Matrix> functions;

  Index total_size() const;
  std::vector<Index> block_sizes() const;
};

/// Block-diagonal K_+ x K_+ matrix of quadrature inner products <psi_k, psi_l>.
Matrix basis_gram_W(const BasisSystem& basis);

struct CoefficientMatrix {
  Matrix values;                  // N x K_+
  std::vector<Index> block_sizes;
};

/// Quadrature-weighted least squares per observation and feature (minimum
/// norm when the basis is rank deficient on the grid). Data must be dense.
CoefficientMatrix fit_coefficients(const Dataset& ds, const BasisSystem& basis);

/// Function values Psi'c of every observation.
Dataset evaluate_coefficients(const CoefficientMatrix& c, const BasisSystem& basis, const Vector& obs_weights);

/// A = diag(sqrt(pi)) (I - 1 Pi') C W^{1/2}.
Matrix build_A(const CoefficientMatrix& c, const Matrix& w, const Vector& obs_weights);

enum class BasisSide { kGram, kCovariance };

struct BasisOptions {
  BasisSide side = BasisSide::kGram;
  ComponentRequest components;
};

/// Either side gives lambda_k and coefficients
///   b_k = l_k^{-1/2} C' (I - Pi 1') diag(sqrt(pi)) u_k,
/// with u_k the unit eigenvector of AA' (recovered as l_k^{-1/2} A v_k from
/// the covariance side). Eigenfunctions are Psi' b_k; b_k' W b_k = 1.
MfpcaModel basis_mfpca(const CoefficientMatrix& c, const BasisSystem& basis, const Vector& obs_weights,
                       const BasisOptions& options = {});
MfpcaModel basis_mfpca(const Dataset& ds, const BasisSystem& basis, const BasisOptions& options = {});

/// Per-feature coefficient vectors b_k of a basis model (K x K_+).
struct BasisModel {
  MfpcaModel model;
  Matrix coefficients;
};
BasisModel basis_mfpca_detail(const CoefficientMatrix& c, const BasisSystem& basis, const Vector& obs_weights,
                              const BasisOptions& options = {});

}  // namespace mfpca
