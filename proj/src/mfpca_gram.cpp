#include "mfpca/mfpca_gram.hpp"

#include <cmath>

#include "mfpca/linalg.hpp"
#include "mfpca/moments.hpp"

namespace mfpca {

MfpcaModel gram_mfpca(const Dataset& ds, const GramOptions& options) {
  const FeatureWeights* fw = options.weights ? &*options.weights : nullptr;
  const GramMatrix gram = gram_estimate(ds, fw, options.noise_variance, options.correct_diagonal);
  const EigenSystem es = symmetric_eigen(gram.values);

  MfpcaModel model;
  model.pathway = Pathway::kGram;
  model.grids = ds.grids();
  model.mean = weighted_mean(ds);
  model.feature_weights = options.weights;
  model.clamped_mass = es.clamped_mass;
  model.rank = es.rank;

  const Vector positive = es.values.head(es.rank);
  const Index count = options.components.resolve(positive, es.rank);
  const std::vector<Matrix> y = centered_blocks(ds, model.mean);
  const Vector& pi = ds.obs_weights();
  const Index n = ds.n_obs();

  model.eigenvalues = es.values.head(count);
  model.explained = positive.sum() > 0.0 ? Vector(model.eigenvalues / positive.sum()) : Vector(model.eigenvalues);
  model.scores.resize(n, count);
  for (const Matrix& yp : y) model.eigenfunctions.emplace_back(count, yp.cols());

  for (Index k = 0; k < count; ++k) {
    const double l = es.values(k);
    const Vector coef = pi.cwiseSqrt().cwiseProduct(es.vectors.col(k)) / std::sqrt(l);
    for (std::size_t p = 0; p < y.size(); ++p) {
      model.eigenfunctions[p].row(k) = coef.transpose() * y[p];
    }
    for (Index i = 0; i < n; ++i) {
      if (pi(i) > 0.0) {
        model.scores(i, k) = std::sqrt(l / pi(i)) * es.vectors(i, k);
        continue;
      }
      // Zero-weight observations do not enter M; project them instead.
      double s = 0.0;
      for (std::size_t p = 0; p < y.size(); ++p) {
        const auto pp = static_cast<Index>(p);
        const Vector q = fw ? fw->effective_quadrature(pp, model.grids[p]) : model.grids[p].quadrature();
        s += (y[p].row(i).array() * q.transpose().array() * model.eigenfunctions[p].row(k).array()).sum();
      }
      model.scores(i, k) = s;
    }
  }
  apply_sign_convention(model);
  model.degenerate = degenerate_blocks(model.eigenvalues);
  return model;
}

}  // namespace mfpca
