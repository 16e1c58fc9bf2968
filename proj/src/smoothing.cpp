#include "mfpca/smoothing.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace mfpca {

namespace {

constexpr double kSingularFit = 1e-12;

Matrix difference_penalty(Index k, int order) {
  if (order < 0) throw Error(ErrorKind::kInvalidArgument, "difference order must be nonnegative");
  Matrix d = Matrix::Identity(k, k);
  for (int r = 0; r < order && d.rows() > 0; ++r) {
    d = (d.bottomRows(d.rows() - 1) - d.topRows(d.rows() - 1)).eval();
  }
  return d.transpose() * d;
}

// Simultaneous diagonalization of G = B'B (observed rows) and the penalty:
// with R = G + P = LL' and L^{-1} G L^{-T} = U diag(g) U', every penalty
// gives c = T diag(1 / (g + lambda (1 - g))) T' B'y, T = L^{-T} U.
struct Factor {
  SparseMatrix b_obs;
  std::vector<Index> rows;
  Matrix t;
  Vector g;
};

Factor factorize(const SparseMatrix& design, const MaskVector& mask, const Matrix& penalty) {
  Factor f;
  for (Index i = 0; i < mask.size(); ++i) {
    if (mask(i)) f.rows.push_back(i);
  }
  if (f.rows.empty()) throw Error(ErrorKind::kEmptyObservation, "curve has no observed points");
  f.b_obs.resize(static_cast<Index>(f.rows.size()), design.cols());
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < f.rows.size(); ++r) {
    for (SparseMatrix::InnerIterator it(design, f.rows[r]); it; ++it) {
      trip.emplace_back(static_cast<Index>(r), it.col(), it.value());
    }
  }
  f.b_obs.setFromTriplets(trip.begin(), trip.end());

  const Matrix gram = Matrix(f.b_obs.transpose() * f.b_obs);
  const Eigen::LLT<Matrix> llt(gram + penalty);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kRankDeficient,
                "observed points do not determine the unpenalized part of the spline");
  }
  const Matrix linv = llt.matrixL().solve(Matrix::Identity(gram.rows(), gram.cols()));
  const Eigen::SelfAdjointEigenSolver<Matrix> es(linv * gram * linv.transpose());
  f.g = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  f.t = linv.transpose() * es.eigenvectors();
  return f;
}

struct CurveFit {
  Vector coefficients;
  double rss = 0.0;
  double df = 0.0;
  double gcv = 0.0;
};

CurveFit fit_one(const Factor& f, const Vector& y_obs, const Vector& z, double lambda) {
  if (lambda < 0.0) throw Error(ErrorKind::kInvalidArgument, "penalty must be nonnegative");
  const Vector denom = (f.g.array() + lambda * (1.0 - f.g.array())).matrix();
  if (denom.minCoeff() <= kSingularFit) {
    throw Error(ErrorKind::kRankDeficient,
                "unpenalized spline system is singular for this sample; use a positive penalty");
  }
  CurveFit out;
  out.coefficients = f.t * z.cwiseQuotient(denom);
  out.rss = (y_obs - f.b_obs * out.coefficients).squaredNorm();
  out.df = f.g.cwiseQuotient(denom).sum();
  const auto n = static_cast<double>(y_obs.size());
  const double resid_df = n - out.df;
  out.gcv = resid_df > 1e-12 ? n * out.rss / (resid_df * resid_df)
                             : std::numeric_limits<double>::infinity();
  return out;
}

Vector observed_values(const Vector& values, const std::vector<Index>& rows) {
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) y(static_cast<Index>(r)) = values(rows[r]);
  return y;
}

// GCV choice among the candidates, or the fixed penalty.
double chosen_penalty(const Factor& f, const Vector& values, const PenaltySpec& pen) {
  if (pen.candidates.empty()) return pen.value;
  const Vector y = observed_values(values, f.rows);
  const Vector z = f.t.transpose() * (f.b_obs.transpose() * y);
  std::vector<double> grid = pen.candidates;
  std::sort(grid.begin(), grid.end());
  double best_gcv = std::numeric_limits<double>::infinity();
  double best = grid.front();
  for (double lambda : grid) {
    const double score = fit_one(f, y, z, lambda).gcv;
    if (score <= best_gcv * (1.0 + 1e-12)) {
      best_gcv = score;
      best = lambda;
    }
  }
  return best;
}

std::string mask_key(const Mask& mask, Index n) {
  std::string key(static_cast<std::size_t>(mask.cols()), '0');
  for (Index m = 0; m < mask.cols(); ++m) {
    if (mask(n, m)) key[static_cast<std::size_t>(m)] = '1';
  }
  return key;
}

// Linear interpolation of (x, y) at every x, constant beyond the observed range.
void interpolate_line(const Vector& x, const std::vector<Index>& obs, const double* y_in,
                      Index stride, double* y_out) {
  const Index n = x.size();
  std::size_t k = 0;
  for (Index i = 0; i < n; ++i) {
    while (k + 1 < obs.size() && obs[k + 1] <= i) ++k;
    const Index a = obs[k];
    if (i <= obs.front()) {
      y_out[i * stride] = y_in[obs.front() * stride];
    } else if (i >= obs.back()) {
      y_out[i * stride] = y_in[obs.back() * stride];
    } else if (a == i) {
      y_out[i * stride] = y_in[a * stride];
    } else {
      const Index b = obs[k + 1];
      const double w = (x(i) - x(a)) / (x(b) - x(a));
      y_out[i * stride] = (1.0 - w) * y_in[a * stride] + w * y_in[b * stride];
    }
  }
}

}  // namespace

BSpline1d::BSpline1d(double lo, double hi, Index n_basis, int degree)
    : n_basis_(n_basis), degree_(degree) {
  if (degree < 0 || n_basis < degree + 1) {
    throw Error(ErrorKind::kInvalidArgument, "need at least degree + 1 B-spline functions");
  }
  if (!(hi > lo)) throw Error(ErrorKind::kDegenerateGrid, "B-spline interval must have positive length");
  knots_.resize(n_basis + degree + 1);
  const double h = (hi - lo) / static_cast<double>(n_basis - degree);
  for (Index j = 0; j < knots_.size(); ++j) knots_(j) = lo + static_cast<double>(j - degree) * h;
  lo_ = lo;
  hi_ = hi;
}

Index BSpline1d::nonzero_values(double x, double* out) const {
  const int p = degree_;
  x = std::clamp(x, lo_, hi_);
  Index span = n_basis_ - 1;
  if (x < hi_) {
    // Last knot index s in [p, n - 1] with knots[s] <= x.
    const double* begin = knots_.data() + p;
    const double* end = knots_.data() + n_basis_;
    span = static_cast<Index>(std::upper_bound(begin, end, x) - knots_.data()) - 1;
  }
  std::vector<double> left(static_cast<std::size_t>(p + 1)), right(static_cast<std::size_t>(p + 1));
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = x - knots_(span + 1 - j);
    right[static_cast<std::size_t>(j)] = knots_(span + j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[static_cast<std::size_t>(r + 1)] +
                                    left[static_cast<std::size_t>(j - r)]);
      out[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    out[j] = saved;
  }
  return span - p;
}

BSplineBasis::BSplineBasis(const DomainGrid& grid, Index n_basis, int degree) : grid_(grid) {
  if (grid.dimension() > 2) throw Error(ErrorKind::kShapeMismatch, "B-spline designs support 1 or 2 axes");
  for (Index d = 0; d < grid.dimension(); ++d) {
    const Vector& ax = grid.axis(d);
    axes_.emplace_back(ax(0), ax(ax.size() - 1), n_basis, degree);
  }
  const int w = degree + 1;
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> v0(static_cast<std::size_t>(w)), v1(static_cast<std::size_t>(w));
  if (grid.dimension() == 1) {
    design_.resize(grid.size(), n_basis);
    for (Index i = 0; i < grid.size(); ++i) {
      const Index f = axes_[0].nonzero_values(grid.axis(0)(i), v0.data());
      for (int a = 0; a < w; ++a) trip.emplace_back(i, f + a, v0[static_cast<std::size_t>(a)]);
    }
  } else {
    const Index n1 = grid.axis(1).size();
    design_.resize(grid.size(), n_basis * n_basis);
    for (Index i = 0; i < grid.axis(0).size(); ++i) {
      const Index f0 = axes_[0].nonzero_values(grid.axis(0)(i), v0.data());
      for (Index j = 0; j < n1; ++j) {
        const Index f1 = axes_[1].nonzero_values(grid.axis(1)(j), v1.data());
        for (int a = 0; a < w; ++a) {
          for (int b = 0; b < w; ++b) {
            trip.emplace_back(i * n1 + j, (f0 + a) * n_basis + (f1 + b),
                              v0[static_cast<std::size_t>(a)] * v1[static_cast<std::size_t>(b)]);
          }
        }
      }
    }
  }
  design_.setFromTriplets(trip.begin(), trip.end());
  design_.makeCompressed();
}

Matrix BSplineBasis::penalty(int difference_order) const {
  if (axes_.size() == 1) return difference_penalty(axes_[0].size(), difference_order);
  const Index k0 = axes_[0].size(), k1 = axes_[1].size();
  const Matrix p0 = difference_penalty(k0, difference_order);
  const Matrix p1 = difference_penalty(k1, difference_order);
  Matrix out = Matrix::Zero(k0 * k1, k0 * k1);
  for (Index i = 0; i < k0; ++i) {
    for (Index j = 0; j < k0; ++j) {
      out.block(i * k1, j * k1, k1, k1).diagonal().array() += p0(i, j);
    }
    out.block(i * k1, i * k1, k1, k1) += p1;
  }
  return out;
}

PenaltySpec PenaltySpec::gcv() {
  PenaltySpec spec;
  for (int i = 0; i <= 20; ++i) spec.candidates.push_back(std::pow(10.0, -5.0 + 0.5 * i));
  return spec;
}

PSplineFit psplines_fit(const FeatureSample& sample, const BSplineBasis& basis, const PenaltySpec& pen) {
  if (!(sample.grid == basis.grid())) throw Error(ErrorKind::kShapeMismatch, "basis built on another grid");
  const Factor f = factorize(basis.design(), sample.mask, basis.penalty(pen.difference_order));
  const double lambda = chosen_penalty(f, sample.values, pen);
  const Vector y = observed_values(sample.values, f.rows);
  const Vector z = f.t.transpose() * (f.b_obs.transpose() * y);
  CurveFit c = fit_one(f, y, z, lambda);
  PSplineFit out{FeatureSample(sample.grid, Vector(basis.design() * c.coefficients)),
                 std::move(c.coefficients), lambda, c.df, c.gcv};
  return out;
}

double select_penalty(const FeatureSample& sample, const BSplineBasis& basis,
                      const std::vector<double>& candidates, int difference_order) {
  if (candidates.empty()) throw Error(ErrorKind::kInvalidArgument, "empty penalty grid");
  PenaltySpec pen{difference_order, 0.0, candidates};
  const Factor f = factorize(basis.design(), sample.mask, basis.penalty(difference_order));
  return chosen_penalty(f, sample.values, pen);
}

FeatureBlock psplines_smooth(const FeatureBlock& block, const BSplineBasis& basis, const PenaltySpec& pen) {
  if (!(block.grid() == basis.grid())) throw Error(ErrorKind::kShapeMismatch, "basis built on another grid");
  const Matrix penalty = basis.penalty(pen.difference_order);
  std::unordered_map<std::string, Factor> cache;
  Matrix out(block.n_obs(), block.grid().size());
  for (Index n = 0; n < block.n_obs(); ++n) {
    const std::string key = mask_key(block.mask(), n);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, factorize(basis.design(), block.mask().row(n).transpose(), penalty)).first;
    }
    const Factor& f = it->second;
    const Vector values = block.values().row(n).transpose();
    const double lambda = chosen_penalty(f, values, pen);
    const Vector y = observed_values(values, f.rows);
    const Vector z = f.t.transpose() * (f.b_obs.transpose() * y);
    out.row(n) = (basis.design() * fit_one(f, y, z, lambda).coefficients).transpose();
  }
  return FeatureBlock(block.grid(), std::move(out));
}

Dataset presmooth(const Dataset& ds, const PenaltySpec& pen, Index n_basis) {
  std::vector<FeatureBlock> blocks;
  for (const FeatureBlock& f : ds.features()) {
    blocks.push_back(psplines_smooth(f, BSplineBasis(f.grid(), n_basis), pen));
  }
  return Dataset(std::move(blocks), ds.obs_weights());
}

FeatureSample linear_interpolate(const FeatureSample& sample) {
  const DomainGrid& grid = sample.grid;
  if (sample.mask.count() == 0) throw Error(ErrorKind::kEmptyObservation, "no observed point to interpolate");
  if (sample.is_dense()) return FeatureSample(grid, sample.values);
  if (grid.dimension() == 1) {
    std::vector<Index> obs;
    for (Index i = 0; i < grid.size(); ++i) {
      if (sample.mask(i)) obs.push_back(i);
    }
    Vector out(grid.size());
    interpolate_line(grid.axis(0), obs, sample.values.data(), 1, out.data());
    return FeatureSample(grid, std::move(out));
  }
  if (grid.dimension() != 2) throw Error(ErrorKind::kShapeMismatch, "interpolation supports 1 or 2 axes");
  const Index n0 = grid.axis(0).size(), n1 = grid.axis(1).size();
  Vector out = Vector::Zero(grid.size());
  std::vector<Index> filled_rows;
  for (Index i = 0; i < n0; ++i) {
    std::vector<Index> obs;
    for (Index j = 0; j < n1; ++j) {
      if (sample.mask(i * n1 + j)) obs.push_back(j);
    }
    if (obs.empty()) continue;
    interpolate_line(grid.axis(1), obs, sample.values.data() + i * n1, 1, out.data() + i * n1);
    filled_rows.push_back(i);
  }
  const Vector rows = out;
  for (Index j = 0; j < n1; ++j) {
    interpolate_line(grid.axis(0), filled_rows, rows.data() + j, n1, out.data() + j);
  }
  return FeatureSample(grid, std::move(out));
}

Dataset interpolate(const Dataset& ds) {
  std::vector<FeatureBlock> blocks;
  for (const FeatureBlock& f : ds.features()) {
    Matrix out(f.n_obs(), f.grid().size());
    for (Index n = 0; n < f.n_obs(); ++n) out.row(n) = linear_interpolate(f.sample(n)).values.transpose();
    blocks.emplace_back(f.grid(), std::move(out));
  }
  return Dataset(std::move(blocks), ds.obs_weights());
}

double estimate_noise_variance(const FeatureBlock& block) {
  const DomainGrid& grid = block.grid();
  const Index n_first = grid.axis(0).size();
  const Index stride = grid.size() / n_first;
  double total = 0.0;
  Index curves = 0;
  for (Index n = 0; n < block.n_obs(); ++n) {
    double sum = 0.0;
    Index pairs = 0;
    for (Index i = 0; i + 1 < n_first; ++i) {
      for (Index r = 0; r < stride; ++r) {
        const Index a = i * stride + r, b = a + stride;
        if (block.mask()(n, a) && block.mask()(n, b)) {
          const double d = block.values()(n, b) - block.values()(n, a);
          sum += d * d;
          ++pairs;
        }
      }
    }
    if (pairs == 0) continue;
    total += sum / (2.0 * static_cast<double>(pairs));
    ++curves;
  }
  if (curves == 0) throw Error(ErrorKind::kEmptyObservation, "no pair of observed neighbours");
  return total / static_cast<double>(curves);
}

}  // namespace mfpca
