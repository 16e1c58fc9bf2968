#include "mfpca/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mfpca {

double ise(std::span<const DomainGrid> grids, const MultiFunction& phi, const MultiFunction& phi_hat) {
  MultiFunction minus = phi, plus = phi;
  for (std::size_t p = 0; p < phi.size(); ++p) {
    minus[p] -= phi_hat.at(p);
    plus[p] += phi_hat.at(p);
  }
  return std::min(squared_norm_h(grids, minus), squared_norm_h(grids, plus));
}

Vector rse(const Vector& lambda, const Vector& lambda_hat) {
  const Index k = std::min(lambda.size(), lambda_hat.size());
  Vector out(k);
  for (Index i = 0; i < k; ++i) {
    if (lambda(i) == 0.0) throw Error(ErrorKind::kInvalidArgument, "true eigenvalue is zero");
    const double d = lambda(i) - lambda_hat(i);
    out(i) = d * d / (lambda(i) * lambda(i));
  }
  return out;
}

double mrse(const Dataset& truth, const Dataset& estimate) {
  if (truth.n_obs() != estimate.n_obs() || truth.n_features() != estimate.n_features()) {
    throw Error(ErrorKind::kShapeMismatch, "datasets differ in size");
  }
  double total = 0.0;
  for (Index p = 0; p < truth.n_features(); ++p) {
    const FeatureBlock& a = truth.feature(p);
    const FeatureBlock& b = estimate.feature(p);
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::kShapeMismatch, "datasets use different grids");
    const Matrix diff = a.values() - b.values();
    total += (diff.cwiseAbs2() * a.grid().quadrature()).sum();
  }
  return total / static_cast<double>(truth.n_obs());
}

namespace {

// Stacks sqrt(q)-scaled functions as columns so the Euclidean inner product
// equals <., .>_H, then orthonormalizes.
Matrix orthonormal_frame(std::span<const DomainGrid> grids, const std::vector<MultiFunction>& fs) {
  Index total = 0;
  for (const DomainGrid& g : grids) total += g.size();
  Matrix m(total, static_cast<Index>(fs.size()));
  for (std::size_t k = 0; k < fs.size(); ++k) {
    Index at = 0;
    for (std::size_t p = 0; p < grids.size(); ++p) {
      m.col(static_cast<Index>(k)).segment(at, grids[p].size()) =
          grids[p].quadrature().cwiseSqrt().cwiseProduct(fs[k].at(p));
      at += grids[p].size();
    }
  }
  const Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

}  // namespace

double subspace_distance(std::span<const DomainGrid> grids, const std::vector<MultiFunction>& phi,
                         const std::vector<MultiFunction>& phi_hat) {
  if (phi.empty() || phi_hat.empty()) throw Error(ErrorKind::kInvalidArgument, "empty function family");
  const Matrix a = orthonormal_frame(grids, phi);
  const Matrix b = orthonormal_frame(grids, phi_hat);
  // ||AA' - BB'||_F^2 = k_a + k_b - 2 ||A'B||_F^2
  return static_cast<double>(a.cols() + b.cols()) - 2.0 * (a.transpose() * b).squaredNorm();
}

}  // namespace mfpca
