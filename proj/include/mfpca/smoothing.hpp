#pragma once

// Penalized B-spline (P-spline) presmoothing, linear interpolation of
// sparsely observed curves and a difference-based noise variance estimate.

#include <Eigen/SparseCore>

#include <vector>

#include "mfpca/fdata.hpp"

namespace mfpca {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// B-splines on [lo, hi] with equispaced knots continued beyond both ends,
/// so linear coefficient sequences give linear functions.
class BSpline1d {
 public:
  BSpline1d(double lo, double hi, Index n_basis, int degree = 3);

  Index size() const { return n_basis_; }
  int degree() const { return degree_; }
  const Vector& knots() const { return knots_; }

  /// Writes the degree + 1 basis values that are nonzero at x into `out` and
  /// returns the index of the first of them.
  Index nonzero_values(double x, double* out) const;

 private:
  Vector knots_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  Index n_basis_;
  int degree_;
};

/// B-spline design over a 1- or 2-axis grid; 2-axis designs are tensor
/// products with coefficient index i * K_1 + j.
class BSplineBasis {
 public:
  /// `n_basis` functions per axis (13 by default).
  explicit BSplineBasis(const DomainGrid& grid, Index n_basis = 13, int degree = 3);

  const DomainGrid& grid() const { return grid_; }
  Index size() const { return static_cast<Index>(design_.cols()); }
  const std::vector<BSpline1d>& axes() const { return axes_; }
  /// M x K evaluation matrix, degree + 1 (per axis) nonzeros per row.
  const SparseMatrix& design() const { return design_; }
  /// Difference penalty D'D; the Kronecker sum of the axis penalties on 2-axis grids.
  Matrix penalty(int difference_order) const;

 private:
  DomainGrid grid_;
  std::vector<BSpline1d> axes_;
  SparseMatrix design_;
};

/// Difference penalty of the P-spline fit. A nonempty candidate list turns
/// on GCV selection among the candidates; otherwise `value` is used.
struct PenaltySpec {
  int difference_order = 2;
  double value = 0.0;
  std::vector<double> candidates;

  static PenaltySpec fixed(double v) { return {2, v, {}}; }
  /// 21 log-spaced candidates on [1e-5, 1e5].
  static PenaltySpec gcv();
};

struct PSplineFit {
  FeatureSample fitted;  // fully observed
  Vector coefficients;
  double penalty = 0.0;
  double effective_df = 0.0;
  double gcv = 0.0;
};

/// Minimizes ||y - Bc||^2 + penalty * c'D'Dc over the observed points and
/// evaluates the fit on the full grid.
PSplineFit psplines_fit(const FeatureSample& sample, const BSplineBasis& basis, const PenaltySpec& pen);

/// GCV choice among `candidates` (ties go to the larger penalty).
double select_penalty(const FeatureSample& sample, const BSplineBasis& basis,
                      const std::vector<double>& candidates, int difference_order = 2);

/// Smooths every curve of a block; curves with identical masks share one
/// factorization.
FeatureBlock psplines_smooth(const FeatureBlock& block, const BSplineBasis& basis, const PenaltySpec& pen);

/// Smooths every feature with a `n_basis`-per-axis basis.
Dataset presmooth(const Dataset& ds, const PenaltySpec& pen, Index n_basis = 13);

/// Piecewise linear interpolation through the observed points, constant
/// beyond the extremes. On 2-axis grids each row (fixed first-axis index)
/// is interpolated along the second axis first, then the filled rows are
/// interpolated along the first axis.
FeatureSample linear_interpolate(const FeatureSample& sample);
Dataset interpolate(const Dataset& ds);

/// Mean over curves of sum (y_{i+1} - y_i)^2 / (2 (m - 1)), differences along
/// the first axis between observed neighbours.
double estimate_noise_variance(const FeatureBlock& block);

}  // namespace mfpca
