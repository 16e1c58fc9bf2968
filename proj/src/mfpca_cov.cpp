#include "mfpca/mfpca_cov.hpp"

#include <cmath>

#include "mfpca/linalg.hpp"
#include "mfpca/moments.hpp"

namespace mfpca {

namespace {

Index default_count(const DomainGrid& grid) { return grid.dimension() >= 2 ? 20 : 15; }

}  // namespace

UnivariateFpca univariate_fpca(const Dataset& ds, Index p, Index count, double noise_variance) {
  if (!ds.is_dense()) throw Error(ErrorKind::kMustDensify, "univariate FPCA needs fully observed data");
  const CovarianceSurface cov = covariance_estimate(ds, p, noise_variance);
  const DomainGrid& grid = ds.feature(p).grid();
  const Vector sq = grid.quadrature().cwiseSqrt();
  const Matrix a = sq.asDiagonal() * cov.values * sq.asDiagonal();

  const Index m = grid.size();
  const Index want = count <= 0 ? m : std::min(count, m);
  const EigenSystem es = want == m ? symmetric_eigen(a) : symmetric_eigen_leading(a, want);
  const Index kept = std::min(want, es.rank);

  UnivariateFpca out;
  out.feature = p;
  out.rank = es.rank;
  out.eigenvalues = es.values.head(kept);
  out.eigenfunctions = (sq.cwiseInverse().asDiagonal() * es.vectors.leftCols(kept)).transpose();
  const Matrix y = ds.feature(p).values().rowwise() - weighted_mean(ds)[static_cast<std::size_t>(p)].transpose();
  out.scores = y * grid.quadrature().asDiagonal() * out.eigenfunctions.transpose();
  return out;
}

MfpcaModel cov_mfpca(const Dataset& ds, const CovOptions& options) {
  if (!ds.is_dense()) throw Error(ErrorKind::kMustDensify, "the covariance pathway needs fully observed data");
  const Index n_feat = ds.n_features();
  if (!options.univariate_counts.empty() && static_cast<Index>(options.univariate_counts.size()) != n_feat) {
    throw Error(ErrorKind::kShapeMismatch, "need one univariate count per feature");
  }
  if (options.noise_variance.size() != 0 && options.noise_variance.size() != n_feat) {
    throw Error(ErrorKind::kShapeMismatch, "need one noise variance per feature");
  }
  const FeatureWeights* fw = options.weights ? &*options.weights : nullptr;
  const Dataset work = fw ? rescale(ds, *fw) : ds;

  // Univariate expansions and the stacked score matrix.
  std::vector<UnivariateFpca> uni;
  Index total = 0;
  for (Index p = 0; p < n_feat; ++p) {
    const Index count = options.univariate_counts.empty()
                            ? default_count(ds.feature(p).grid())
                            : options.univariate_counts[static_cast<std::size_t>(p)];
    double sigma2 = options.noise_variance.size() ? options.noise_variance(p) : 0.0;
    if (fw && sigma2 > 0.0) {
      sigma2 *= fw->effective_quadrature(p, ds.feature(p).grid()).sum() / ds.feature(p).grid().volume();
    }
    uni.push_back(univariate_fpca(work, p, count, sigma2));
    total += uni.back().eigenvalues.size();
  }
  const Index n = ds.n_obs();
  Matrix stacked(n, total);
  std::vector<Index> offset;
  for (Index p = 0, at = 0; p < n_feat; ++p) {
    offset.push_back(at);
    const Matrix& s = uni[static_cast<std::size_t>(p)].scores;
    stacked.middleCols(at, s.cols()) = s;
    at += s.cols();
  }

  Matrix z;
  if (options.divisor == ScoreDivisor::kNMinusOne) {
    if (n < 2) throw Error(ErrorKind::kInvalidArgument, "the N - 1 divisor needs at least two observations");
    z = stacked.transpose() * stacked / static_cast<double>(n - 1);
  } else {
    z = stacked.transpose() * ds.obs_weights().asDiagonal() * stacked;
  }
  const EigenSystem es = symmetric_eigen(z);

  MfpcaModel model;
  model.pathway = Pathway::kCovariance;
  model.grids = ds.grids();
  model.mean = weighted_mean(ds);
  model.feature_weights = options.weights;
  model.clamped_mass = es.clamped_mass;
  model.rank = es.rank;

  const Vector positive = es.values.head(es.rank);
  const Index count = options.components.resolve(positive, es.rank);
  model.eigenvalues = es.values.head(count);
  model.explained = positive.sum() > 0.0 ? Vector(model.eigenvalues / positive.sum()) : Vector(model.eigenvalues);
  model.scores = stacked * es.vectors.leftCols(count);
  for (Index p = 0; p < n_feat; ++p) {
    const UnivariateFpca& u = uni[static_cast<std::size_t>(p)];
    Matrix phi = es.vectors.block(offset[static_cast<std::size_t>(p)], 0, u.eigenvalues.size(), count).transpose() *
                 u.eigenfunctions;
    if (fw) phi = phi * sqrt_weight(fw, p, ds.feature(p).grid()).cwiseInverse().asDiagonal();
    model.eigenfunctions.push_back(std::move(phi));
  }
  apply_sign_convention(model);
  model.degenerate = degenerate_blocks(model.eigenvalues);
  return model;
}

}  // namespace mfpca
