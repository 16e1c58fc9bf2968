#include "mfpca/fdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mfpca {

namespace {

bool is_equidistant(const Vector& x) {
  if (x.size() < 3) return true;
  const double h = (x(x.size() - 1) - x(0)) / static_cast<double>(x.size() - 1);
  for (Index i = 1; i < x.size(); ++i) {
    if (std::abs((x(i) - x(i - 1)) - h) > 1e-10 * std::max(1.0, std::abs(h))) return false;
  }
  return true;
}

void require_same_grids(std::span<const DomainGrid> grids, const MultiFunction& f,
                        const char* what) {
  if (f.size() != grids.size()) {
    throw Error(ErrorKind::kShapeMismatch, std::string(what) + ": feature count differs from grids");
  }
  for (std::size_t p = 0; p < grids.size(); ++p) {
    if (f[p].size() != grids[p].size()) {
      throw Error(ErrorKind::kShapeMismatch,
                  std::string(what) + ": feature " + std::to_string(p) + " has " +
                      std::to_string(f[p].size()) + " values for " +
                      std::to_string(grids[p].size()) + " grid points");
    }
  }
}

// Symmetric Sinkhorn scaling: positive x with x_p (S x)_p = 1.
Vector balance_symmetric(const Matrix& s) {
  const Index p = s.rows();
  Vector x = (s * Vector::Ones(p)).cwiseInverse();
  for (int iter = 0; iter < 10000; ++iter) {
    const Vector sx = s * x;
    Vector next = (x.array() / sx.array()).sqrt().matrix();
    const double change = ((next - x).array().abs() / next.array()).maxCoeff();
    x = next;
    if (change < 1e-15) break;
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------- DomainGrid

DomainGrid::DomainGrid(std::vector<Vector> axes) {
  if (axes.empty()) throw Error(ErrorKind::kDegenerateGrid, "grid needs at least one axis");
  auto impl = std::make_shared<Impl>();
  impl->size = 1;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const Vector& a = axes[d];
    if (a.size() < 2) {
      throw Error(ErrorKind::kDegenerateGrid,
                  "axis " + std::to_string(d) + " has fewer than 2 points");
    }
    for (Index i = 1; i < a.size(); ++i) {
      if (!(a(i) > a(i - 1))) {
        throw Error(ErrorKind::kDegenerateGrid,
                    "axis " + std::to_string(d) + " is not strictly increasing");
      }
    }
    impl->equidistant.push_back(is_equidistant(a));
    impl->size *= a.size();
  }
  impl->axes = std::move(axes);

  // Tensor product, last axis fastest.
  Vector q = Vector::Ones(1);
  for (const Vector& a : impl->axes) {
    const Vector w = trapezoid_weights(a);
    Vector next(q.size() * w.size());
    for (Index i = 0; i < q.size(); ++i) next.segment(i * w.size(), w.size()) = q(i) * w;
    q = std::move(next);
  }
  impl->quadrature = std::move(q);
  impl_ = std::move(impl);
}

DomainGrid DomainGrid::uniform(double lo, double hi, Index n) {
  if (n < 2) throw Error(ErrorKind::kDegenerateGrid, "uniform grid needs at least 2 points");
  return DomainGrid({Vector::LinSpaced(n, lo, hi)});
}

DomainGrid DomainGrid::uniform2d(double lo0, double hi0, Index n0, double lo1, double hi1,
                                 Index n1) {
  if (n0 < 2 || n1 < 2) {
    throw Error(ErrorKind::kDegenerateGrid, "uniform grid needs at least 2 points per axis");
  }
  return DomainGrid({Vector::LinSpaced(n0, lo0, hi0), Vector::LinSpaced(n1, lo1, hi1)});
}

std::vector<Index> DomainGrid::shape() const {
  std::vector<Index> out;
  for (const Vector& a : impl_->axes) out.push_back(a.size());
  return out;
}

double DomainGrid::volume() const {
  double v = 1.0;
  for (const Vector& a : impl_->axes) v *= a(a.size() - 1) - a(0);
  return v;
}

double DomainGrid::coordinate(Index flat, Index d) const {
  Index stride = 1;
  for (Index k = dimension() - 1; k > d; --k) stride *= axis(k).size();
  const Index i = (flat / stride) % axis(d).size();
  return axis(d)(i);
}

bool DomainGrid::operator==(const DomainGrid& other) const {
  if (impl_ == other.impl_) return true;
  if (dimension() != other.dimension()) return false;
  for (Index d = 0; d < dimension(); ++d) {
    if (axis(d).size() != other.axis(d).size()) return false;
    if (axis(d) != other.axis(d)) return false;
  }
  return true;
}

Vector trapezoid_weights(const Vector& points) {
  const Index m = points.size();
  if (m < 2) throw Error(ErrorKind::kDegenerateGrid, "trapezoid rule needs at least 2 points");
  Vector w(m);
  w(0) = 0.5 * (points(1) - points(0));
  w(m - 1) = 0.5 * (points(m - 1) - points(m - 2));
  for (Index i = 1; i + 1 < m; ++i) w(i) = 0.5 * (points(i + 1) - points(i - 1));
  return w;
}

Vector quadrature_weights(const DomainGrid& grid) { return grid.quadrature(); }

// ------------------------------------------------------------- FeatureSample

FeatureSample::FeatureSample(DomainGrid g, Vector v)
    : FeatureSample(std::move(g), std::move(v), MaskVector()) {}

FeatureSample::FeatureSample(DomainGrid g, Vector v, MaskVector m)
    : grid(std::move(g)), values(std::move(v)), mask(std::move(m)) {
  if (mask.size() == 0) mask = MaskVector::Constant(values.size(), true);
  if (values.size() != grid.size() || mask.size() != grid.size()) {
    throw Error(ErrorKind::kShapeMismatch, "sample values/mask do not match the grid");
  }
}

// -------------------------------------------------------------- FeatureBlock

FeatureBlock::FeatureBlock(DomainGrid grid, Matrix values)
    : FeatureBlock(std::move(grid), std::move(values), Mask()) {}

FeatureBlock::FeatureBlock(DomainGrid grid, Matrix values, Mask mask)
    : grid_(std::move(grid)), values_(std::move(values)), mask_(std::move(mask)) {
  if (mask_.size() == 0) mask_ = Mask::Constant(values_.rows(), values_.cols(), true);
  if (values_.cols() != grid_.size()) {
    throw Error(ErrorKind::kShapeMismatch, "feature values have " +
                                               std::to_string(values_.cols()) +
                                               " columns for a grid of " +
                                               std::to_string(grid_.size()) + " points");
  }
  if (mask_.rows() != values_.rows() || mask_.cols() != values_.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "mask shape differs from values");
  }
}

FeatureSample FeatureBlock::sample(Index n) const {
  return FeatureSample(grid_, values_.row(n).transpose(), mask_.row(n).transpose());
}

// ------------------------------------------------------------------- Dataset

Dataset::Dataset(std::vector<FeatureBlock> features)
    : Dataset(std::move(features), Vector()) {}

Dataset::Dataset(std::vector<FeatureBlock> features, Vector obs_weights)
    : features_(std::move(features)), weights_(std::move(obs_weights)) {
  if (features_.empty()) throw Error(ErrorKind::kInvalidArgument, "dataset needs P >= 1");
  const Index n = features_.front().n_obs();
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "dataset needs N >= 1");
  for (const FeatureBlock& f : features_) {
    if (f.n_obs() != n) {
      throw Error(ErrorKind::kShapeMismatch, "features disagree on the number of observations");
    }
    grids_.push_back(f.grid());
  }
  if (weights_.size() == 0) weights_ = Vector::Constant(n, 1.0 / static_cast<double>(n));
  if (weights_.size() != n) {
    throw Error(ErrorKind::kShapeMismatch, "observation weights must have length N");
  }
  if ((weights_.array() < 0.0).any()) {
    throw Error(ErrorKind::kInvalidArgument, "observation weights must be nonnegative");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInvalidArgument, "observation weights must sum to 1");
  }
}

bool Dataset::is_dense() const {
  return std::all_of(features_.begin(), features_.end(),
                     [](const FeatureBlock& f) { return f.is_dense(); });
}

Index Dataset::total_points() const {
  Index m = 0;
  for (const FeatureBlock& f : features_) m += f.grid().size();
  return m;
}

MultiFunction Dataset::observation(Index n) const {
  MultiFunction out;
  out.reserve(features_.size());
  for (const FeatureBlock& f : features_) out.push_back(f.values().row(n).transpose());
  return out;
}

Dataset Dataset::with_feature(Index p, FeatureBlock block) const {
  std::vector<FeatureBlock> features = features_;
  if (!(block.grid() == features[static_cast<std::size_t>(p)].grid()) ||
      block.n_obs() != n_obs()) {
    throw Error(ErrorKind::kShapeMismatch, "replacement feature block has a different shape");
  }
  features[static_cast<std::size_t>(p)] = std::move(block);
  return Dataset(std::move(features), weights_);
}

Dataset Dataset::with_obs_weights(Vector obs_weights) const {
  return Dataset(features_, std::move(obs_weights));
}

// ------------------------------------------------------------ FeatureWeights

FeatureWeights FeatureWeights::scalar(Vector w) {
  if ((w.array() <= 0.0).any() || !w.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "feature weights must be strictly positive");
  }
  FeatureWeights fw;
  fw.kind = Kind::kScalar;
  fw.scalar_weights = std::move(w);
  return fw;
}

FeatureWeights FeatureWeights::pointwise(std::vector<Vector> w) {
  for (const Vector& v : w) {
    if ((v.array() <= 0.0).any() || !v.allFinite()) {
      throw Error(ErrorKind::kInvalidArgument, "feature weight functions must be strictly positive");
    }
  }
  FeatureWeights fw;
  fw.kind = Kind::kPointwise;
  fw.pointwise_weights = std::move(w);
  return fw;
}

Vector FeatureWeights::effective_quadrature(Index p, const DomainGrid& grid) const {
  if (kind == Kind::kScalar) {
    if (p >= scalar_weights.size()) {
      throw Error(ErrorKind::kShapeMismatch, "missing scalar weight for feature");
    }
    return scalar_weights(p) * grid.quadrature();
  }
  const auto idx = static_cast<std::size_t>(p);
  if (idx >= pointwise_weights.size() || pointwise_weights[idx].size() != grid.size()) {
    throw Error(ErrorKind::kShapeMismatch, "pointwise weight does not match the feature grid");
  }
  return grid.quadrature().cwiseProduct(pointwise_weights[idx]);
}

// ---------------------------------------------------------------- functions

MultiFunction zero_function(std::span<const DomainGrid> grids) {
  return constant_function(grids, 0.0);
}

MultiFunction constant_function(std::span<const DomainGrid> grids, double value) {
  MultiFunction f;
  for (const DomainGrid& g : grids) f.push_back(Vector::Constant(g.size(), value));
  return f;
}

double inner_product_h(std::span<const DomainGrid> grids, const MultiFunction& f,
                       const MultiFunction& g, const FeatureWeights* fw) {
  require_same_grids(grids, f, "inner product");
  require_same_grids(grids, g, "inner product");
  double total = 0.0;
  for (std::size_t p = 0; p < grids.size(); ++p) {
    const auto pi = static_cast<Index>(p);
    const Vector q = fw ? fw->effective_quadrature(pi, grids[p]) : grids[p].quadrature();
    total += (q.array() * f[p].array() * g[p].array()).sum();
  }
  return total;
}

double squared_norm_h(std::span<const DomainGrid> grids, const MultiFunction& f) {
  return inner_product_h(grids, f, f);
}

MultiFunction weighted_mean(const Dataset& ds) {
  const Vector& pi = ds.obs_weights();
  MultiFunction mean;
  for (const FeatureBlock& f : ds.features()) {
    if (f.is_dense()) {
      mean.push_back(f.values().transpose() * pi);
      continue;
    }
    const Matrix m = f.mask().cast<double>();
    const Vector denom = m.transpose() * pi;
    if ((denom.array() <= 0.0).any()) {
      throw Error(ErrorKind::kEmptyObservation, "a grid point is observed by no curve");
    }
    const Vector num = f.values().cwiseProduct(m).transpose() * pi;
    mean.push_back(num.cwiseQuotient(denom));
  }
  return mean;
}

Dataset center(const Dataset& ds, const MultiFunction& mean) {
  require_same_grids(ds.grids(), mean, "center");
  std::vector<FeatureBlock> out;
  for (Index p = 0; p < ds.n_features(); ++p) {
    const FeatureBlock& f = ds.feature(p);
    Matrix v = f.values().rowwise() - mean[static_cast<std::size_t>(p)].transpose();
    out.emplace_back(f.grid(), std::move(v), f.mask());
  }
  return Dataset(std::move(out), ds.obs_weights());
}

FeatureWeights standardization_weights(const Dataset& ds, StandardizationScheme scheme) {
  if (ds.n_obs() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "standardization needs at least 2 observations");
  }
  const Vector& pi = ds.obs_weights();
  const MultiFunction mean = weighted_mean(ds);
  const auto P = ds.n_features();

  if (scheme == StandardizationScheme::kGammaNorm) {
    if (!ds.is_dense()) {
      throw Error(ErrorKind::kMustDensify, "gamma_norm weights need dense data");
    }
    // S_pq = int int C_pq^2 = sum_nm pi_n pi_m G^p_nm G^q_nm with the per-feature
    // Gram G^p = Y_p Q_p Y_p^T.
    std::vector<Matrix> grams;
    for (Index p = 0; p < P; ++p) {
      const FeatureBlock& f = ds.feature(p);
      const Matrix y = f.values().rowwise() - mean[static_cast<std::size_t>(p)].transpose();
      const Matrix yq = y * f.grid().quadrature().cwiseSqrt().asDiagonal();
      grams.push_back(yq * yq.transpose());
    }
    const Matrix pipi = pi * pi.transpose();
    Matrix s(P, P);
    for (Index p = 0; p < P; ++p) {
      for (Index q = p; q < P; ++q) {
        const Matrix& gp = grams[static_cast<std::size_t>(p)];
        const Matrix& gq = grams[static_cast<std::size_t>(q)];
        s(p, q) = s(q, p) = gp.cwiseProduct(gq).cwiseProduct(pipi).sum();
      }
    }
    for (Index p = 0; p < P; ++p) {
      if (!(s(p, p) > 0.0)) {
        throw Error(ErrorKind::kDegenerateFeature,
                    "feature " + std::to_string(p) + " has zero covariance norm");
      }
    }
    return FeatureWeights::scalar(balance_symmetric(s));
  }

  // Pointwise observation-weighted variance.
  std::vector<Vector> variance;
  for (Index p = 0; p < P; ++p) {
    const FeatureBlock& f = ds.feature(p);
    const Matrix y = f.values().rowwise() - mean[static_cast<std::size_t>(p)].transpose();
    const Matrix m = f.mask().cast<double>();
    const Vector denom = m.transpose() * pi;
    const Vector num = y.cwiseProduct(y).cwiseProduct(m).transpose() * pi;
    variance.push_back(num.cwiseQuotient(denom));
  }

  if (scheme == StandardizationScheme::kIntegratedVariance) {
    Vector w(P);
    for (Index p = 0; p < P; ++p) {
      const double iv =
          ds.feature(p).grid().quadrature().dot(variance[static_cast<std::size_t>(p)]);
      if (!(iv > 0.0)) {
        throw Error(ErrorKind::kDegenerateFeature,
                    "feature " + std::to_string(p) + " has zero integrated variance");
      }
      w(p) = 1.0 / iv;
    }
    return FeatureWeights::scalar(std::move(w));
  }

  std::vector<Vector> w;
  for (Index p = 0; p < P; ++p) {
    const Vector& v = variance[static_cast<std::size_t>(p)];
    if (!(v.array() > 0.0).all()) {
      throw Error(ErrorKind::kDegenerateFeature,
                  "feature " + std::to_string(p) + " has zero variance at a grid point");
    }
    w.push_back(v.cwiseInverse());
  }
  return FeatureWeights::pointwise(std::move(w));
}

Dataset rescale(const Dataset& ds, const FeatureWeights& fw) {
  const MultiFunction mean = weighted_mean(ds);
  std::vector<FeatureBlock> out;
  for (Index p = 0; p < ds.n_features(); ++p) {
    const FeatureBlock& f = ds.feature(p);
    Matrix v = f.values().rowwise() - mean[static_cast<std::size_t>(p)].transpose();
    if (fw.kind == FeatureWeights::Kind::kScalar) {
      if (p >= fw.scalar_weights.size()) {
        throw Error(ErrorKind::kShapeMismatch, "missing scalar weight for feature");
      }
      v *= std::sqrt(fw.scalar_weights(p));
    } else {
      const Vector& w = fw.pointwise_weights.at(static_cast<std::size_t>(p));
      if (w.size() != f.grid().size()) {
        throw Error(ErrorKind::kShapeMismatch, "pointwise weight does not match the feature grid");
      }
      v = v * w.cwiseSqrt().asDiagonal();
    }
    out.emplace_back(f.grid(), std::move(v), f.mask());
  }
  return Dataset(std::move(out), ds.obs_weights());
}

}  // namespace mfpca
