#pragma once

// Grids, multivariate functional datasets, trapezoid quadrature, the
// inner product of H = L2(T_1) x ... x L2(T_P), centering and feature
// standardization.

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mfpca/error.hpp"

namespace mfpca {

using Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using MaskVector = Eigen::Array<bool, Eigen::Dynamic, 1>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Rectangular sampling grid of one feature domain. Points are stored per
/// axis; grid points are flattened in row-major axis order (last axis
/// fastest). Copies share the immutable point data.
class DomainGrid {
 public:
  explicit DomainGrid(std::vector<Vector> axes);

  /// Equidistant grid with `n` points on [lo, hi] per axis.
  static DomainGrid uniform(double lo, double hi, Index n);
  static DomainGrid uniform2d(double lo0, double hi0, Index n0, double lo1, double hi1,
                              Index n1);

  Index dimension() const { return static_cast<Index>(impl_->axes.size()); }
  Index size() const { return impl_->size; }
  const Vector& axis(Index d) const { return impl_->axes[static_cast<std::size_t>(d)]; }
  std::vector<Index> shape() const;
  bool equidistant(Index d) const { return impl_->equidistant[static_cast<std::size_t>(d)]; }
  double volume() const;

  /// Cached tensor-product trapezoid weights (see quadrature_weights).
  const Vector& quadrature() const { return impl_->quadrature; }

  /// Coordinates of flat grid point `flat` along axis `d`.
  double coordinate(Index flat, Index d) const;

  bool operator==(const DomainGrid& other) const;

 private:
  struct Impl {
    std::vector<Vector> axes;
    std::vector<bool> equidistant;
    Index size = 0;
    Vector quadrature;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Tensor product of per-axis trapezoid weights; sums to the domain volume.
Vector quadrature_weights(const DomainGrid& grid);

/// Per-axis trapezoid weights for a strictly increasing point vector.
Vector trapezoid_weights(const Vector& points);

/// One observation of one feature.
struct FeatureSample {
  DomainGrid grid;
  Vector values;
  MaskVector mask;  // true = observed

  FeatureSample(DomainGrid g, Vector v);
  FeatureSample(DomainGrid g, Vector v, MaskVector m);
  Index observed_count() const { return mask.count(); }
  bool is_dense() const { return mask.all(); }
};

/// All N observations of one feature, N x M_p (row = observation).
class FeatureBlock {
 public:
  FeatureBlock(DomainGrid grid, Matrix values);
  FeatureBlock(DomainGrid grid, Matrix values, Mask mask);

  const DomainGrid& grid() const { return grid_; }
  const Matrix& values() const { return values_; }
  const Mask& mask() const { return mask_; }
  Index n_obs() const { return values_.rows(); }
  bool is_dense() const { return mask_.all(); }
  FeatureSample sample(Index n) const;

 private:
  DomainGrid grid_;
  Matrix values_;
  Mask mask_;
};

/// A multivariate function: one value vector per feature, on the grids of a
/// dataset.
using MultiFunction = std::vector<Vector>;

class Dataset {
 public:
  /// Uniform observation weights 1/N.
  explicit Dataset(std::vector<FeatureBlock> features);
  Dataset(std::vector<FeatureBlock> features, Vector obs_weights);

  Index n_obs() const { return features_.front().n_obs(); }
  Index n_features() const { return static_cast<Index>(features_.size()); }
  const FeatureBlock& feature(Index p) const { return features_[static_cast<std::size_t>(p)]; }
  const std::vector<FeatureBlock>& features() const { return features_; }
  const Vector& obs_weights() const { return weights_; }
  const std::vector<DomainGrid>& grids() const { return grids_; }
  bool is_dense() const;
  Index total_points() const;

  MultiFunction observation(Index n) const;
  Dataset with_feature(Index p, FeatureBlock block) const;
  Dataset with_obs_weights(Vector obs_weights) const;

 private:
  std::vector<FeatureBlock> features_;
  std::vector<DomainGrid> grids_;
  Vector weights_;
};

/// Feature weights of the weighted inner product: either one positive scalar
/// per feature or one positive function per feature on its grid.
struct FeatureWeights {
  enum class Kind { kScalar, kPointwise };

  static FeatureWeights scalar(Vector w);
  static FeatureWeights pointwise(std::vector<Vector> w);

  Kind kind = Kind::kScalar;
  Vector scalar_weights;
  std::vector<Vector> pointwise_weights;

  /// Quadrature weights of feature p multiplied by the feature weight.
  Vector effective_quadrature(Index p, const DomainGrid& grid) const;
};

enum class StandardizationScheme { kIntegratedVariance, kPointwiseSd, kGammaNorm };

MultiFunction zero_function(std::span<const DomainGrid> grids);
MultiFunction constant_function(std::span<const DomainGrid> grids, double value);

/// <f, g>_H (or <f, g>_w when `fw` is given) by trapezoid quadrature.
double inner_product_h(std::span<const DomainGrid> grids, const MultiFunction& f,
                       const MultiFunction& g, const FeatureWeights* fw = nullptr);
double squared_norm_h(std::span<const DomainGrid> grids, const MultiFunction& f);

/// Observation-weighted mean computed only over observed points; a point
/// observed by no curve raises kEmptyObservation.
MultiFunction weighted_mean(const Dataset& ds);

/// Subtracts `mean` from every observation; masks are preserved.
Dataset center(const Dataset& ds, const MultiFunction& mean);

/// Standardization weights of the three supported schemes. Variances and
/// covariances use the observation weights.
///
/// kGammaNorm returns the weights w with
///   w_p = ( integral over T_p of ||C_{p.}(t_p, .)||_w^2 dt_p )^{-1},
/// where the inner norm is the w-weighted norm of H. The equation is implicit
/// in w and is solved by symmetric Sinkhorn scaling; after rescaling every
/// feature contributes exactly 1 to the total d_Gamma inertia.
FeatureWeights standardization_weights(const Dataset& ds, StandardizationScheme scheme);

/// X~^(p) = w_p^{1/2} (X^(p) - mu^(p)) with the observation-weighted mean.
Dataset rescale(const Dataset& ds, const FeatureWeights& fw);

}  // namespace mfpca
