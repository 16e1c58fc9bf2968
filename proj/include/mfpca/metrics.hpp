#pragma once

// Error measures between true and estimated eigen-elements and curves.

#include "mfpca/fdata.hpp"

namespace mfpca {

/// sum_p integral (phi - phi_hat)^2 at the better of the two signs of phi_hat.
double ise(std::span<const DomainGrid> grids, const MultiFunction& phi, const MultiFunction& phi_hat);

/// (lambda - lambda_hat)^2 / lambda^2 componentwise over the common length.
Vector rse(const Vector& lambda, const Vector& lambda_hat);

/// N^{-1} sum_n ||X_n - X_hat_n||_H^2.
double mrse(const Dataset& truth, const Dataset& estimate);

/// ||P - P_hat||_HS^2 between the projectors onto span{phi_k} and
/// span{phi_hat_k}; both families are orthonormalized in H first. Used for
/// blocks of (near) equal eigenvalues where individual functions are not
/// identifiable.
double subspace_distance(std::span<const DomainGrid> grids, const std::vector<MultiFunction>& phi,
                         const std::vector<MultiFunction>& phi_hat);

}  // namespace mfpca
