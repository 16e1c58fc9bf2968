#pragma once

#include <utility>
#include <vector>

#include "mfpca/fdata.hpp"

namespace mfpca {

/// Symmetric eigendecomposition sorted by nonincreasing eigenvalue.
struct EigenSystem {
  Vector values;   // clamped at 0
  Matrix vectors;  // orthonormal columns
  Index rank = 0;  // count of values > rank_tolerance
  double rank_tolerance = 0.0;
  double clamped_mass = 0.0;  // sum of |negative eigenvalues| set to 0
};

/// Full decomposition. Negative eigenvalues are clamped to zero and the
/// clamped mass is reported; rank tolerance is n * eps * l_1.
EigenSystem symmetric_eigen(const Matrix& m);

/// Leading `count` eigenpairs only (same conventions). The rank tolerance
/// still uses the full dimension n.
EigenSystem symmetric_eigen_leading(const Matrix& m, Index count);

/// Symmetric square root of a PSD matrix; eigenvalues are floored at
/// eps * max before rooting. Throws kBasisDegeneracy when the matrix has a
/// clearly negative eigenvalue or no positive one.
Matrix symmetric_sqrt(const Matrix& w);

/// Index ranges [first, last] of eigenvalues whose relative gap to the
/// neighbour is below `relative_gap`; singletons are omitted.
std::vector<std::pair<Index, Index>> degenerate_blocks(const Vector& values,
                                                       double relative_gap = 1e-9);

}  // namespace mfpca
