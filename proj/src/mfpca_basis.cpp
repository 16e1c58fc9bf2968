#include "mfpca/mfpca_basis.hpp"

#include <Eigen/QR>

#include <cmath>

#include "mfpca/linalg.hpp"

namespace mfpca {

Index BasisSystem::total_size() const {
  Index total = 0;
  for (const Matrix& f : functions) total += f.rows();
  return total;
}

std::vector<Index> BasisSystem::block_sizes() const {
  std::vector<Index> out;
  for (const Matrix& f : functions) out.push_back(f.rows());
  return out;
}

namespace {

void validate(const BasisSystem& basis) {
  if (basis.grids.size() != basis.functions.size() || basis.grids.empty()) {
    throw Error(ErrorKind::kShapeMismatch, "basis needs one function block per feature grid");
  }
  for (std::size_t p = 0; p < basis.grids.size(); ++p) {
    if (basis.functions[p].cols() != basis.grids[p].size() || basis.functions[p].rows() == 0) {
      throw Error(ErrorKind::kShapeMismatch, "basis block does not match its grid");
    }
  }
}

}  // namespace

Matrix basis_gram_W(const BasisSystem& basis) {
  validate(basis);
  const Index total = basis.total_size();
  Matrix w = Matrix::Zero(total, total);
  Index at = 0;
  for (std::size_t p = 0; p < basis.grids.size(); ++p) {
    const Matrix& psi = basis.functions[p];
    w.block(at, at, psi.rows(), psi.rows()) = psi * basis.grids[p].quadrature().asDiagonal() * psi.transpose();
    at += psi.rows();
  }
  return w;
}

CoefficientMatrix fit_coefficients(const Dataset& ds, const BasisSystem& basis) {
  validate(basis);
  if (!ds.is_dense()) throw Error(ErrorKind::kMustDensify, "coefficient fitting needs fully observed data");
  if (static_cast<Index>(basis.grids.size()) != ds.n_features()) {
    throw Error(ErrorKind::kShapeMismatch, "basis and dataset have different feature counts");
  }
  CoefficientMatrix out;
  out.block_sizes = basis.block_sizes();
  out.values.resize(ds.n_obs(), basis.total_size());
  Index at = 0;
  for (Index p = 0; p < ds.n_features(); ++p) {
    const Matrix& psi = basis.functions[static_cast<std::size_t>(p)];
    if (!(ds.feature(p).grid() == basis.grids[static_cast<std::size_t>(p)])) {
      throw Error(ErrorKind::kShapeMismatch, "basis grid differs from the data grid");
    }
    const Vector sq = ds.feature(p).grid().quadrature().cwiseSqrt();
    const Matrix design = sq.asDiagonal() * psi.transpose();  // M x K
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
    const Matrix rhs = sq.asDiagonal() * ds.feature(p).values().transpose();
    out.values.middleCols(at, psi.rows()) = cod.solve(rhs).transpose();
    at += psi.rows();
  }
  return out;
}

Dataset evaluate_coefficients(const CoefficientMatrix& c, const BasisSystem& basis, const Vector& obs_weights) {
  validate(basis);
  std::vector<FeatureBlock> blocks;
  Index at = 0;
  for (std::size_t p = 0; p < basis.grids.size(); ++p) {
    const Matrix& psi = basis.functions[p];
    blocks.emplace_back(basis.grids[p], Matrix(c.values.middleCols(at, psi.rows()) * psi));
    at += psi.rows();
  }
  return Dataset(std::move(blocks), obs_weights);
}

Matrix build_A(const CoefficientMatrix& c, const Matrix& w, const Vector& obs_weights) {
  if (w.rows() != c.values.cols() || obs_weights.size() != c.values.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "A needs N x K_+ coefficients, K_+ x K_+ W and N weights");
  }
  // W is block diagonal, so its root is taken block by block.
  Matrix root = Matrix::Zero(w.rows(), w.cols());
  Index at = 0;
  for (Index size : c.block_sizes) {
    root.block(at, at, size, size) = symmetric_sqrt(w.block(at, at, size, size));
    at += size;
  }
  const Vector mean = c.values.transpose() * obs_weights;
  const Matrix centered = c.values.rowwise() - mean.transpose();
  return obs_weights.cwiseSqrt().asDiagonal() * centered * root;
}

BasisModel basis_mfpca_detail(const CoefficientMatrix& c, const BasisSystem& basis, const Vector& obs_weights,
                              const BasisOptions& options) {
  const Matrix w = basis_gram_W(basis);
  const Matrix a = build_A(c, w, obs_weights);
  const Index n = a.rows();

  EigenSystem es;
  Matrix u;  // unit eigenvectors of AA'
  if (options.side == BasisSide::kGram) {
    es = symmetric_eigen(a * a.transpose());
    u = es.vectors;
  } else {
    es = symmetric_eigen(a.transpose() * a);
    u.resize(n, es.rank);
    for (Index k = 0; k < es.rank; ++k) u.col(k) = a * es.vectors.col(k) / std::sqrt(es.values(k));
  }

  BasisModel out;
  MfpcaModel& model = out.model;
  model.pathway = Pathway::kBasis;
  model.grids = basis.grids;
  model.clamped_mass = es.clamped_mass;
  model.rank = es.rank;

  const Vector positive = es.values.head(es.rank);
  const Index count = options.components.resolve(positive, es.rank);
  model.eigenvalues = es.values.head(count);
  model.explained = positive.sum() > 0.0 ? Vector(model.eigenvalues / positive.sum()) : Vector(model.eigenvalues);

  const Vector mean_c = c.values.transpose() * obs_weights;
  const Matrix centered = c.values.rowwise() - mean_c.transpose();
  const Vector sqrt_pi = obs_weights.cwiseSqrt();
  out.coefficients.resize(count, c.values.cols());
  for (Index k = 0; k < count; ++k) {
    out.coefficients.row(k) =
        (centered.transpose() * sqrt_pi.cwiseProduct(u.col(k))).transpose() / std::sqrt(es.values(k));
  }
  model.scores = centered * w * out.coefficients.transpose();

  Index at = 0;
  for (std::size_t p = 0; p < basis.grids.size(); ++p) {
    const Matrix& psi = basis.functions[p];
    model.eigenfunctions.push_back(out.coefficients.middleCols(at, psi.rows()) * psi);
    model.mean.push_back(psi.transpose() * mean_c.segment(at, psi.rows()));
    at += psi.rows();
  }

  // Keep the coefficients consistent with the sign-aligned eigenfunctions.
  const std::vector<Matrix> before = model.eigenfunctions;
  apply_sign_convention(model);
  for (Index k = 0; k < count; ++k) {
    bool flipped = false;
    for (std::size_t p = 0; p < before.size() && !flipped; ++p) {
      flipped = before[p].row(k).dot(model.eigenfunctions[p].row(k)) < 0.0;
    }
    if (flipped) out.coefficients.row(k) *= -1.0;
  }
  model.degenerate = degenerate_blocks(model.eigenvalues);
  return out;
}

MfpcaModel basis_mfpca(const CoefficientMatrix& c, const BasisSystem& basis, const Vector& obs_weights,
                       const BasisOptions& options) {
  return basis_mfpca_detail(c, basis, obs_weights, options).model;
}

MfpcaModel basis_mfpca(const Dataset& ds, const BasisSystem& basis, const BasisOptions& options) {
  return basis_mfpca(fit_coefficients(ds, basis), basis, ds.obs_weights(), options);
}

}  // namespace mfpca
