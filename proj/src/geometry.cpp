#include "mfpca/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mfpca/moments.hpp"
#include "mfpca/rng.hpp"

namespace mfpca {

namespace {

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

DualityGeometry::DualityGeometry(const Dataset& ds)
    : grids_(ds.grids()), pi_(ds.obs_weights()), y_(centered_blocks(ds, weighted_mean(ds))) {
  const auto n_feat = static_cast<std::size_t>(ds.n_features());
  c_.resize(n_feat);
  for (std::size_t p = 0; p < n_feat; ++p) {
    for (std::size_t q = 0; q < n_feat; ++q) {
      c_[p].push_back(y_[p].transpose() * pi_.asDiagonal() * y_[q]);
    }
  }
  gram_ = gram_estimate(ds).values;
}

MultiFunction DualityGeometry::centered(Index n) const {
  MultiFunction f;
  for (const Matrix& y : y_) f.push_back(y.row(n).transpose());
  return f;
}

Vector DualityGeometry::apply_LX(const MultiFunction& f) const {
  Vector out(n_obs());
  for (Index n = 0; n < n_obs(); ++n) out(n) = std::sqrt(pi_(n)) * inner_product_h(grids_, centered(n), f);
  return out;
}

MultiFunction DualityGeometry::apply_LX_star(const Vector& u) const {
  if (u.size() != n_obs()) throw Error(ErrorKind::kShapeMismatch, "L*_X needs an N-vector");
  MultiFunction out;
  const Vector coef = pi_.cwiseSqrt().cwiseProduct(u);
  for (const Matrix& y : y_) out.push_back(y.transpose() * coef);
  return out;
}

MultiFunction DualityGeometry::apply_gamma(const MultiFunction& f) const {
  MultiFunction out;
  for (std::size_t p = 0; p < c_.size(); ++p) {
    Vector v = Vector::Zero(grids_[p].size());
    for (std::size_t q = 0; q < c_.size(); ++q) v += c_[p][q] * grids_[q].quadrature().cwiseProduct(f[q]);
    out.push_back(std::move(v));
  }
  return out;
}

double DualityGeometry::inner_gamma(const MultiFunction& f, const MultiFunction& g) const {
  return inner_product_h(grids_, f, apply_gamma(g));
}

double DualityGeometry::surface_energy() const {
  double total = 0.0;
  for (std::size_t p = 0; p < c_.size(); ++p) {
    for (std::size_t q = 0; q < c_.size(); ++q) {
      const Vector& qp = grids_[p].quadrature();
      const Vector& qq = grids_[q].quadrature();
      total += (qp.asDiagonal() * c_[p][q].cwiseAbs2() * qq.asDiagonal()).sum();
    }
  }
  return total;
}

Vector apply_LX(const Dataset& ds, const MultiFunction& f) { return DualityGeometry(ds).apply_LX(f); }

MultiFunction apply_LX_star(const Dataset& ds, const Vector& u) { return DualityGeometry(ds).apply_LX_star(u); }

double check_adjoint(const Dataset& ds, Index trials, std::uint64_t seed) {
  const DualityGeometry geo(ds);
  CounterRng rng(seed, Stream::kTrial);
  double worst = 0.0;
  for (Index t = 0; t < trials; ++t) {
    Vector a(geo.n_obs()), u(geo.n_obs());
    for (Index n = 0; n < a.size(); ++n) a(n) = rng.normal();
    for (Index n = 0; n < u.size(); ++n) u(n) = rng.normal();
    MultiFunction f = zero_function(geo.grids());
    for (Index n = 0; n < a.size(); ++n) {
      const MultiFunction yn = geo.centered(n);
      for (std::size_t p = 0; p < f.size(); ++p) f[p] += a(n) * yn[p];
    }
    const double lhs = geo.apply_LX(f).dot(geo.gram() * u);
    const double rhs = inner_product_h(geo.grids(), geo.apply_gamma(f), geo.apply_LX_star(u));
    worst = std::max(worst, relative_gap(lhs, rhs));
  }
  return worst;
}

double squared_distance_d(std::span<const DomainGrid> grids, const MultiFunction& f, const MultiFunction& g) {
  MultiFunction diff = f;
  for (std::size_t p = 0; p < diff.size(); ++p) diff[p] -= g.at(p);
  return squared_norm_h(grids, diff);
}

double squared_distance_d_gamma(const Dataset& ds, const MultiFunction& f, const MultiFunction& g) {
  const DualityGeometry geo(ds);
  MultiFunction diff = f;
  for (std::size_t p = 0; p < diff.size(); ++p) diff[p] -= g.at(p);
  return geo.inner_gamma(diff, diff);
}

double InertiaReport::spread(const std::array<double, 3>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  return scale > 0.0 ? (*hi - *lo) / scale : 0.0;
}

InertiaReport inertia_report(const Dataset& ds) {
  const DualityGeometry geo(ds);
  const Vector& pi = ds.obs_weights();
  const Index n = ds.n_obs();
  const std::vector<DomainGrid>& grids = geo.grids();
  const MultiFunction mu = weighted_mean(ds);

  std::vector<MultiFunction> x;
  for (Index i = 0; i < n; ++i) x.push_back(ds.observation(i));
  std::vector<MultiFunction> gamma_y;
  std::vector<Vector> lx;
  for (Index i = 0; i < n; ++i) {
    const MultiFunction yi = geo.centered(i);
    gamma_y.push_back(geo.apply_gamma(yi));
    lx.push_back(geo.apply_LX(yi));
  }

  InertiaReport r;
  r.center_distances.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double d2 = squared_distance_d(grids, x[static_cast<std::size_t>(i)], mu);
    r.center_distances(i) = std::sqrt(d2);
    r.d[0] += pi(i) * d2;
    r.d_gamma[0] += pi(i) * inner_product_h(grids, geo.centered(i), gamma_y[static_cast<std::size_t>(i)]);
    r.features[0] += pi(i) * lx[static_cast<std::size_t>(i)].squaredNorm();
  }

  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      const double w = pi(i) * pi(j);  // each unordered pair counted once = half of the double sum
      r.d[1] += w * squared_distance_d(grids, x[si], x[sj]);
      MultiFunction gdiff = gamma_y[si];
      MultiFunction diff = x[si];
      for (std::size_t p = 0; p < diff.size(); ++p) {
        diff[p] -= x[sj][p];
        gdiff[p] -= gamma_y[sj][p];
      }
      r.d_gamma[1] += w * inner_product_h(grids, diff, gdiff);
      r.features[1] += w * (lx[si] - lx[sj]).squaredNorm();
    }
  }

  for (std::size_t p = 0; p < grids.size(); ++p) {
    const CovarianceSurface c = covariance_estimate(ds, static_cast<Index>(p));
    r.d[2] += grids[p].quadrature().dot(c.values.diagonal());
  }
  r.d_gamma[2] = geo.surface_energy();
  r.features[2] = r.d_gamma[2];
  return r;
}

AngleCosine angle_cosine(const Dataset& ds, const MultiFunction& f, const MultiFunction& g) {
  const DualityGeometry geo(ds);
  const Vector lf = geo.apply_LX(f), lg = geo.apply_LX(g);
  AngleCosine out;
  const double den_r = lf.norm() * lg.norm();
  out.from_projections = den_r > 0.0 ? lf.dot(lg) / den_r : 0.0;
  const double fg = geo.inner_gamma(f, g);
  const double den_h = std::sqrt(std::max(0.0, geo.inner_gamma(f, f)) * std::max(0.0, geo.inner_gamma(g, g)));
  out.from_gamma = den_h > 0.0 ? fg / den_h : 0.0;
  out.difference = out.from_projections - out.from_gamma;
  return out;
}

void write_report(std::ostream& text, std::ostream& csv, const InertiaReport& r, double adjoint_residual) {
  const auto row = [&](const char* name, const std::array<double, 3>& v) {
    text << name << ": center " << v[0] << ", pairs " << v[1] << ", surfaces " << v[2]
         << " (spread " << InertiaReport::spread(v) << ")\n";
    static const char* routes[] = {"center", "pairs", "surfaces"};
    for (int i = 0; i < 3; ++i) csv << name << ',' << routes[i] << ',' << v[static_cast<std::size_t>(i)] << '\n';
  };
  csv << "quantity,route,value\n";
  row("inertia_d", r.d);
  row("inertia_d_gamma", r.d_gamma);
  row("inertia_features", r.features);
  text << "adjoint residual: " << adjoint_residual << '\n';
  csv << "adjoint,residual," << adjoint_residual << '\n';
}

}  // namespace mfpca
