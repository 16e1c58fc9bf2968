#include "mfpca/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mfpca/rng.hpp"

namespace mfpca {

namespace {

Index fourier_frequency(Index j) { return j / 2; }

void require_resolved(Index max_index, Index points, const char* axis) {
  // Products of two basis functions reach frequency 2 f; trapezoid on an
  // equidistant periodic grid is exact below M - 1.
  if (2 * fourier_frequency(max_index) >= points - 1 && max_index > 1) {
    throw Error(ErrorKind::kAliasing, std::string("Fourier index ") + std::to_string(max_index) +
                                          " is not resolved by " + std::to_string(points) +
                                          " points on the " + axis + " axis");
  }
}

}  // namespace

std::pair<Index, Index> fourier_pair(Index k) {
  if (k < 0) throw Error(ErrorKind::kInvalidArgument, "component index must be nonnegative");
  Index shell = 1;
  Index first = 0;  // number of pairs before this shell
  while (first + 2 * shell - 1 <= k) {
    first += 2 * shell - 1;
    ++shell;
  }
  const Index offset = k - first;
  if (offset == 2 * shell - 2) return {shell, shell};
  const Index i = offset / 2 + 1;
  return offset % 2 == 0 ? std::pair{i, shell} : std::pair{shell, i};
}

Vector fourier_function(Index j, const Vector& x, double lo, double hi) {
  if (j < 1) throw Error(ErrorKind::kInvalidArgument, "Fourier index is 1-based");
  const double length = hi - lo;
  if (j == 1) return Vector::Constant(x.size(), 1.0 / std::sqrt(length));
  const double f = static_cast<double>(fourier_frequency(j));
  const double scale = std::sqrt(2.0 / length);
  const Vector arg = (2.0 * std::numbers::pi * f / length) * (x.array() - lo).matrix();
  if (j % 2 == 0) return scale * arg.array().sin().matrix();
  return scale * arg.array().cos().matrix();
}

Matrix fourier_tensor_basis(Index count, const DomainGrid& grid) {
  if (count < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one basis image");
  if (grid.dimension() != 2) throw Error(ErrorKind::kShapeMismatch, "Fourier images need a 2-axis grid");
  const Vector& s = grid.axis(0);
  const Vector& t = grid.axis(1);
  Index max_l = 1, max_m = 1;
  for (Index k = 0; k < count; ++k) {
    const auto [l, m] = fourier_pair(k);
    max_l = std::max(max_l, l);
    max_m = std::max(max_m, m);
  }
  require_resolved(max_l, s.size(), "first");
  require_resolved(max_m, t.size(), "second");

  Matrix out(count, grid.size());
  for (Index k = 0; k < count; ++k) {
    const auto [l, m] = fourier_pair(k);
    const Vector fs = fourier_function(l, s, s(0), s(s.size() - 1));
    const Vector ft = fourier_function(m, t, t(0), t(t.size() - 1));
    for (Index i = 0; i < s.size(); ++i) out.row(k).segment(i * t.size(), t.size()) = fs(i) * ft.transpose();
  }
  return out;
}

Matrix legendre_basis(Index count, const DomainGrid& grid, LegendreNormalization norm) {
  if (count < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one Legendre function");
  if (grid.dimension() != 1) throw Error(ErrorKind::kShapeMismatch, "Legendre basis needs a 1-axis grid");
  const Vector& t = grid.axis(0);
  const double a = t(0), b = t(t.size() - 1);
  const Vector x = ((2.0 * t.array() - a - b) / (b - a)).matrix();

  Matrix out(count, grid.size());
  Vector prev = Vector::Ones(x.size());
  Vector cur = x;
  for (Index k = 0; k < count; ++k) {
    Vector pk;
    if (k == 0) {
      pk = prev;
    } else if (k == 1) {
      pk = cur;
    } else {
      // (n + 1) P_{n+1} = (2n + 1) x P_n - n P_{n-1}, here n = k - 1.
      const double n = static_cast<double>(k - 1);
      Vector next = (((2.0 * n + 1.0) * x.array() * cur.array() - n * prev.array()) / (n + 1.0)).matrix();
      prev = cur;
      cur = next;
      pk = cur;
    }
    out.row(k) = std::sqrt((2.0 * static_cast<double>(k) + 1.0) / (b - a)) * pk.transpose();
  }

  if (norm == LegendreNormalization::kQuadrature) {
    if (count > grid.size()) {
      throw Error(ErrorKind::kRankDeficient, "cannot orthonormalize " + std::to_string(count) +
                                                 " functions on " + std::to_string(grid.size()) +
                                                 " points");
    }
    const Matrix gram = out * grid.quadrature().asDiagonal() * out.transpose();
    const Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::kRankDeficient, "Legendre family is numerically dependent on this grid");
    }
    out = llt.matrixL().solve(out);
  }
  return out;
}

Vector kl_eigenvalues(Index count) {
  Vector lambda(count);
  for (Index k = 0; k < count; ++k) lambda(k) = std::exp(-(static_cast<double>(k + 1) + 1.0) / 2.0);
  return lambda;
}

MultiFunction KLModel::eigenfunction(Index k) const {
  MultiFunction f;
  for (const Matrix& e : eigenfunctions) f.push_back(e.row(k).transpose());
  return f;
}

KLModel build_kl_model(Index count, const DomainGrid& image_grid, const DomainGrid& curve_grid,
                       const AlphaRule& alpha_rule, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one component");
  KLModel model;
  model.grids = {image_grid, curve_grid};
  model.eigenvalues = kl_eigenvalues(count);

  CounterRng rng(seed, Stream::kAlpha);
  model.alpha.resize(count);
  switch (alpha_rule.kind) {
    case AlphaRule::Kind::kUniformPerComponent:
      for (Index k = 0; k < count; ++k) model.alpha(k) = rng.uniform(alpha_rule.lo, alpha_rule.hi);
      break;
    case AlphaRule::Kind::kUniformShared:
      model.alpha.setConstant(rng.uniform(alpha_rule.lo, alpha_rule.hi));
      break;
    case AlphaRule::Kind::kFixed:
      model.alpha.setConstant(alpha_rule.value);
      break;
  }
  if ((model.alpha.array() < 0.0).any() || (model.alpha.array() > 1.0).any()) {
    throw Error(ErrorKind::kInvalidArgument, "alpha must lie in [0, 1]");
  }

  const Matrix images = fourier_tensor_basis(count, image_grid);
  model.quadrature_orthonormal = count <= curve_grid.size();
  const Matrix curves = legendre_basis(count, curve_grid,
                                       model.quadrature_orthonormal
                                           ? LegendreNormalization::kQuadrature
                                           : LegendreNormalization::kAnalytic);
  model.eigenfunctions = {model.alpha.cwiseSqrt().asDiagonal() * images,
                          (1.0 - model.alpha.array()).sqrt().matrix().asDiagonal() * curves};
  model.mean = zero_function(model.grids);
  return model;
}

Dataset simulate_from_scores(const KLModel& model, const Matrix& scores) {
  if (scores.cols() != model.n_components()) {
    throw Error(ErrorKind::kShapeMismatch, "score matrix must have K columns");
  }
  std::vector<FeatureBlock> blocks;
  for (std::size_t p = 0; p < model.grids.size(); ++p) {
    Matrix values = scores * model.eigenfunctions[p];
    values.rowwise() += model.mean[p].transpose();
    blocks.emplace_back(model.grids[p], std::move(values));
  }
  return Dataset(std::move(blocks));
}

Simulated simulate(const KLModel& model, Index n_obs, std::uint64_t seed) {
  if (n_obs < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one observation");
  CounterRng rng(seed, Stream::kScores);
  const Vector sd = model.eigenvalues.cwiseSqrt();
  Matrix scores(n_obs, model.n_components());
  for (Index n = 0; n < n_obs; ++n) {
    for (Index k = 0; k < model.n_components(); ++k) scores(n, k) = sd(k) * rng.normal();
  }
  Dataset data = simulate_from_scores(model, scores);
  return {std::move(data), std::move(scores)};
}

Dataset add_noise(const Dataset& ds, const NoiseSpec& spec, std::uint64_t seed) {
  if (spec.variance.size() != ds.n_features()) {
    throw Error(ErrorKind::kShapeMismatch, "noise spec needs one variance per feature");
  }
  if ((spec.variance.array() < 0.0).any()) {
    throw Error(ErrorKind::kInvalidArgument, "noise variance must be nonnegative");
  }
  CounterRng rng(seed, Stream::kNoise);
  std::vector<FeatureBlock> blocks;
  for (Index p = 0; p < ds.n_features(); ++p) {
    const FeatureBlock& f = ds.feature(p);
    Matrix values = f.values();
    const double sd = std::sqrt(spec.variance(p));
    for (Index n = 0; n < values.rows(); ++n) {
      for (Index m = 0; m < values.cols(); ++m) {
        const double e = rng.normal();
        if (f.mask()(n, m)) values(n, m) += sd * e;
      }
    }
    blocks.emplace_back(f.grid(), std::move(values), f.mask());
  }
  return Dataset(std::move(blocks), ds.obs_weights());
}

Dataset sparsify(const Dataset& ds, const SparsityRegime& regime, std::uint64_t seed) {
  if (!(regime.min_missing >= 0.0 && regime.min_missing <= regime.max_missing &&
        regime.max_missing < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "missing fractions must satisfy 0 <= lo <= hi < 1");
  }
  CounterRng rng(seed, Stream::kMask);
  std::vector<FeatureBlock> blocks;
  std::vector<Mask> masks;
  for (const FeatureBlock& f : ds.features()) masks.emplace_back(f.mask());

  for (Index n = 0; n < ds.n_obs(); ++n) {
    for (Index p = 0; p < ds.n_features(); ++p) {
      const DomainGrid& grid = ds.feature(p).grid();
      const Index m = grid.size();
      const double frac = rng.uniform(regime.min_missing, regime.max_missing);
      const auto lo = static_cast<Index>(std::ceil(regime.min_missing * static_cast<double>(m)));
      const auto hi = static_cast<Index>(std::floor(regime.max_missing * static_cast<double>(m)));
      const Index missing =
          std::clamp<Index>(std::llround(frac * static_cast<double>(m)), lo, std::max(lo, hi));
      if (missing == 0) continue;
      const Index kept = m - missing;
      if (kept < 2) {
        throw Error(ErrorKind::kSparsify, "regime leaves fewer than 2 of " + std::to_string(m) +
                                              " points on feature " + std::to_string(p));
      }

      // Two anchors that differ along every axis.
      Index a0 = 0, a1 = 0;
      for (Index d = 0; d < grid.dimension(); ++d) {
        const auto len = static_cast<std::uint64_t>(grid.axis(d).size());
        auto i0 = static_cast<Index>(rng.below(len));
        auto i1 = static_cast<Index>(rng.below(len - 1));
        if (i1 >= i0) ++i1;
        a0 = a0 * grid.axis(d).size() + i0;
        a1 = a1 * grid.axis(d).size() + i1;
      }
      std::vector<Index> rest;
      rest.reserve(static_cast<std::size_t>(m));
      for (Index i = 0; i < m; ++i) {
        if (i != a0 && i != a1) rest.push_back(i);
      }
      // Partial Fisher-Yates: the first kept - 2 entries stay observed.
      const auto take = static_cast<std::size_t>(kept - 2);
      for (std::size_t i = 0; i < take; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(rest.size() - i));
        std::swap(rest[i], rest[j]);
      }
      auto row = masks[static_cast<std::size_t>(p)].row(n);
      MaskVector keep = MaskVector::Constant(m, false);
      keep(a0) = keep(a1) = true;
      for (std::size_t i = 0; i < take; ++i) keep(rest[i]) = true;
      row = row && keep.transpose();
    }
  }
  for (Index p = 0; p < ds.n_features(); ++p) {
    blocks.emplace_back(ds.feature(p).grid(), ds.feature(p).values(),
                        std::move(masks[static_cast<std::size_t>(p)]));
  }
  return Dataset(std::move(blocks), ds.obs_weights());
}

}  // namespace mfpca
