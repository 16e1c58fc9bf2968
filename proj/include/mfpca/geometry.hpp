#pragma once

// The duality between the observation space H and R^N: the operators L_X
// and L*_X, the two distances on H, cloud inertias and the angle identity.
// Gamma is applied through the empirical covariance surfaces on the grids,
// independently of the Gram matrix, so every identity below compares two
// separate computations.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mfpca/fdata.hpp"

namespace mfpca {

/// Precomputed pieces of one dense dataset: centered blocks, covariance
/// surfaces C_pq and the Gram matrix.
class DualityGeometry {
 public:
  explicit DualityGeometry(const Dataset& ds);

  const std::vector<DomainGrid>& grids() const { return grids_; }
  Index n_obs() const { return pi_.size(); }

  /// (L_X f)_n = sqrt(pi_n) <X_n - mu, f>_H.
  Vector apply_LX(const MultiFunction& f) const;
  /// L*_X u = sum_n sqrt(pi_n) u_n (X_n - mu).
  MultiFunction apply_LX_star(const Vector& u) const;
  /// (Gamma f)_p = sum_q integral C_pq(., t) f_q(t) dt.
  MultiFunction apply_gamma(const MultiFunction& f) const;
  double inner_gamma(const MultiFunction& f, const MultiFunction& g) const;
  const Matrix& gram() const { return gram_; }
  /// X_n - mu.
  MultiFunction centered(Index n) const;
  /// sum_p integral ||C_p.(t_p, .)||^2 dt_p from the surfaces.
  double surface_energy() const;

 private:
  std::vector<DomainGrid> grids_;
  Vector pi_;
  std::vector<Matrix> y_;                // centered, N x M_p
  std::vector<std::vector<Matrix>> c_;   // c_[p][q] = C_pq
  Matrix gram_;
};

Vector apply_LX(const Dataset& ds, const MultiFunction& f);
MultiFunction apply_LX_star(const Dataset& ds, const Vector& u);

/// Largest relative residual of (L_X f)' M u = <Gamma f, L*_X u>_H over
/// `trials` random pairs, f drawn from the span of the centered data.
double check_adjoint(const Dataset& ds, Index trials, std::uint64_t seed);

double squared_distance_d(std::span<const DomainGrid> grids, const MultiFunction& f, const MultiFunction& g);
double squared_distance_d_gamma(const Dataset& ds, const MultiFunction& f, const MultiFunction& g);

/// Each identity evaluated three ways: about the center, from all pairs,
/// and from the variance / covariance surfaces.
struct InertiaReport {
  std::array<double, 3> d{};        // cloud of observations, distance d
  std::array<double, 3> d_gamma{};  // cloud of observations, distance d_Gamma
  std::array<double, 3> features{}; // cloud of features in R^N
  Vector center_distances;          // d(M_n, G_mu)

  /// (max - min) / max |value| of one triple; 0 for an all-zero triple.
  static double spread(const std::array<double, 3>& v);
};

InertiaReport inertia_report(const Dataset& ds);

struct AngleCosine {
  double from_projections = 0.0;  // via L_X in R^N
  double from_gamma = 0.0;        // via <., .>_Gamma in H
  double difference = 0.0;
};

AngleCosine angle_cosine(const Dataset& ds, const MultiFunction& f, const MultiFunction& g);

/// Human-readable summary and CSV rows (quantity,route,value).
void write_report(std::ostream& text, std::ostream& csv, const InertiaReport& r, double adjoint_residual);

}  // namespace mfpca
