#include "mfpca/moments.hpp"

namespace mfpca {

namespace {

void require_dense(const Dataset& ds, const char* what) {
  if (!ds.is_dense()) {
    throw Error(ErrorKind::kMustDensify, std::string(what) + " needs fully observed data; interpolate or smooth first");
  }
}

double mean_feature_weight(const FeatureWeights* fw, Index p, const DomainGrid& grid) {
  if (fw == nullptr) return 1.0;
  if (fw->kind == FeatureWeights::Kind::kScalar) return fw->scalar_weights(p);
  return fw->effective_quadrature(p, grid).sum() / grid.volume();
}

// Pairwise-complete weighted cross product of centered, mask-zeroed blocks.
CovarianceSurface cross_product(const Dataset& ds, Index p, Index q) {
  const MultiFunction mu = weighted_mean(ds);
  const FeatureBlock& fp = ds.feature(p);
  const FeatureBlock& fq = ds.feature(q);
  const Vector& pi = ds.obs_weights();
  Matrix yp = fp.values().rowwise() - mu[static_cast<std::size_t>(p)].transpose();
  Matrix yq = fq.values().rowwise() - mu[static_cast<std::size_t>(q)].transpose();

  CovarianceSurface out;
  out.p = p;
  out.q = q;
  out.degenerate = (pi.array() > 0.0).count() < 2;
  if (fp.is_dense() && fq.is_dense()) {
    out.values = yp.transpose() * pi.asDiagonal() * yq;
    return out;
  }
  const Matrix mp = fp.mask().cast<double>();
  const Matrix mq = fq.mask().cast<double>();
  yp = yp.cwiseProduct(mp);
  yq = yq.cwiseProduct(mq);
  const Matrix num = yp.transpose() * pi.asDiagonal() * yq;
  const Matrix den = mp.transpose() * pi.asDiagonal() * mq;
  out.values = num.binaryExpr(den, [](double a, double b) { return b > 0.0 ? a / b : 0.0; });
  return out;
}

}  // namespace

MultiFunction mean_estimate(const Dataset& ds) { return weighted_mean(ds); }

CovarianceSurface covariance_estimate(const Dataset& ds, Index p, double noise_variance) {
  if (noise_variance < 0.0) throw Error(ErrorKind::kInvalidArgument, "noise variance must be nonnegative");
  CovarianceSurface out = cross_product(ds, p, p);
  if (noise_variance > 0.0) {
    for (Index i = 0; i < out.values.rows(); ++i) {
      double& d = out.values(i, i);
      d -= noise_variance;
      if (d < 0.0) {
        d = 0.0;
        ++out.floored;
      }
    }
  }
  return out;
}

CovarianceSurface cross_covariance_estimate(const Dataset& ds, Index p, Index q) {
  return cross_product(ds, p, q);
}

std::vector<Matrix> centered_blocks(const Dataset& ds, const MultiFunction& mean) {
  require_dense(ds, "centering");
  std::vector<Matrix> out;
  for (Index p = 0; p < ds.n_features(); ++p) {
    out.push_back(ds.feature(p).values().rowwise() - mean[static_cast<std::size_t>(p)].transpose());
  }
  return out;
}

GramMatrix gram_estimate(const Dataset& ds, const FeatureWeights* fw, const Vector& noise_variance,
                         bool correct_diagonal) {
  require_dense(ds, "the Gram matrix");
  if (correct_diagonal && noise_variance.size() != ds.n_features()) {
    throw Error(ErrorKind::kShapeMismatch, "diagonal correction needs one noise variance per feature");
  }
  const std::vector<Matrix> y = centered_blocks(ds, weighted_mean(ds));
  const Vector sqrt_pi = ds.obs_weights().cwiseSqrt();
  const Index n = ds.n_obs();
  GramMatrix out;
  out.values = Matrix::Zero(n, n);
  for (Index p = 0; p < ds.n_features(); ++p) {
    const DomainGrid& grid = ds.feature(p).grid();
    const Vector q = fw ? fw->effective_quadrature(p, grid) : grid.quadrature();
    const Matrix yp = sqrt_pi.asDiagonal() * y[static_cast<std::size_t>(p)];
    out.values.noalias() += yp * q.asDiagonal() * yp.transpose();
  }
  out.values = 0.5 * (out.values + out.values.transpose()).eval();
  if (correct_diagonal) {
    double shift = 0.0;
    for (Index p = 0; p < ds.n_features(); ++p) {
      shift += mean_feature_weight(fw, p, ds.feature(p).grid()) * noise_variance(p);
    }
    out.values.diagonal() -= shift * ds.obs_weights();
    out.corrected = true;
  }
  return out;
}

}  // namespace mfpca
