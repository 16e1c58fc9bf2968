// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mfpca/bench.hpp"
#include "mfpca/geometry.hpp"
#include "mfpca/metrics.hpp"
#include "mfpca/mfpca_basis.hpp"
#include "mfpca/mfpca_cov.hpp"
#include "mfpca/mfpca_gram.hpp"
#include "mfpca/moments.hpp"
#include "support.hpp"

using namespace mfpca;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  std::printf("criterion %d %-28s %s  %s  [%.1f s]\n", id, name.c_str(), pass ? "PASS" : "FAIL", detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

// Generating basis of the simulation model: Fourier images and Legendre curves.
BasisSystem generating_basis(const KLModel& model) {
  const DomainGrid& g1 = model.grids[0];
  const DomainGrid& g2 = model.grids[1];
  const Index k = model.n_components();
  return BasisSystem{{g1, g2},
                     {fourier_tensor_basis(k, g1),
                      legendre_basis(k, g2, model.quadrature_orthonormal ? LegendreNormalization::kQuadrature
                                                                         : LegendreNormalization::kAnalytic)}};
}

double max_rel_diff(const Vector& a, const Vector& b, double floor) {
  double worst = 0.0;
  for (Index k = 0; k < std::min(a.size(), b.size()); ++k) {
    if (a(k) <= floor) break;
    worst = std::max(worst, std::abs(a(k) - b(k)) / a(k));
  }
  return worst;
}

void duality_equivalence() {
  const auto t0 = Clock::now();
  const KLModel model = fixtures::kl_model(101, 11, 11, 21, 25);
  const Dataset ds = simulate(model, 50, 101).data;

  const MfpcaModel gram = gram_mfpca(ds);
  const BasisSystem basis = generating_basis(model);
  BasisOptions gram_side, cov_side;
  cov_side.side = BasisSide::kCovariance;
  const MfpcaModel basis_g = basis_mfpca(ds, basis, gram_side);
  const MfpcaModel basis_c = basis_mfpca(ds, basis, cov_side);
  CovOptions co;
  co.univariate_counts = {0, 0};
  co.divisor = ScoreDivisor::kWeighted;
  const MfpcaModel cov = cov_mfpca(ds, co);

  const double floor = 1e-6 * gram.eigenvalues(0);
  Index significant = 0;
  while (significant < gram.eigenvalues.size() && gram.eigenvalues(significant) > floor) ++significant;
  bool counts_ok = true;
  for (const MfpcaModel* m : {&basis_g, &basis_c, &cov}) {
    Index s = 0;
    while (s < m->eigenvalues.size() && m->eigenvalues(s) > floor) ++s;
    counts_ok = counts_ok && s == significant;
  }
  const double pairwise = std::max({max_rel_diff(gram.eigenvalues, basis_g.eigenvalues, floor),
                                    max_rel_diff(gram.eigenvalues, basis_c.eigenvalues, floor),
                                    max_rel_diff(gram.eigenvalues, cov.eigenvalues, floor),
                                    max_rel_diff(basis_g.eigenvalues, cov.eigenvalues, floor)});
  const double sides = max_rel_diff(basis_g.eigenvalues, basis_c.eigenvalues, floor);
  const double t = elapsed(t0);
  report(1, "duality equivalence", counts_ok && pairwise < 1e-4 && sides < 1e-9 && t < 10.0,
         fmt("components %.0f, max pairwise rel %.2e, basis sides rel %.2e", double(significant), pairwise, sides), t);
}

void identity_suite() {
  const auto t0 = Clock::now();
  double adjoint = 0.0, inertia = 0.0, cosine = 0.0;
  for (Index i = 0; i < 20; ++i) {
    const Index n = 5 + (i * 7) % 26;  // 5..30
    const std::uint64_t seed = 200 + static_cast<std::uint64_t>(i);
    Dataset ds = i % 2 == 0 ? fixtures::random_dataset(n, seed)
                            : add_noise(fixtures::kl_data(n, seed).data, {Vector::Constant(2, 0.25)}, seed);
    ds = ds.with_obs_weights(fixtures::random_weights(n, seed));
    adjoint = std::max(adjoint, check_adjoint(ds, 5, seed));
    const InertiaReport r = inertia_report(ds);
    inertia = std::max({inertia, InertiaReport::spread(r.d), InertiaReport::spread(r.d_gamma),
                        InertiaReport::spread(r.features)});
    CounterRng rng(seed, Stream::kTrial);
    MultiFunction f, g;
    for (const DomainGrid& grid : ds.grids()) {
      Vector a(grid.size()), b(grid.size());
      for (Index m = 0; m < a.size(); ++m) {
        a(m) = rng.normal();
        b(m) = rng.normal();
      }
      f.push_back(a);
      g.push_back(b);
    }
    const AngleCosine c = angle_cosine(ds, f, g);
    cosine = std::max(cosine, std::abs(c.difference) / std::max(std::abs(c.from_gamma), 1e-300));
  }
  const double t = elapsed(t0);
  report(2, "identity suite", adjoint < 1e-8 && inertia < 1e-8 && cosine < 1e-8 && t < 30.0,
         fmt("adjoint %.2e, inertia %.2e, cosine %.2e", adjoint, inertia, cosine), t);
}

void eigenvalue_recovery() {
  const auto t0 = Clock::now();
  ScenarioConfig cfg;
  cfg.id = "recovery";
  cfg.n_obs = 250;
  cfg.image_rows = 26;
  cfg.image_cols = 26;
  cfg.curve_points = 51;
  cfg.replications = 20;
  cfg.k_retain = 3;
  cfg.warmup = false;
  cfg.pathways = {Pathway::kGram};
  const std::vector<RunRecord> records = run_scenario(cfg);
  std::vector<std::vector<double>> rse_k(3);
  bool all_ok = true;
  for (const RunRecord& r : records) {
    all_ok = all_ok && r.ok();
    if (r.ok()) {
      for (Index k = 0; k < 3; ++k) rse_k[static_cast<std::size_t>(k)].push_back(r.rse(k));
    }
  }
  const double m1 = median(rse_k[0]), m2 = median(rse_k[1]), m3 = median(rse_k[2]);
  report(3, "eigenvalue recovery", all_ok && std::max({m1, m2, m3}) < 0.05,
         fmt("median RSE %.4f, %.4f, %.4f", m1, m2, m3), elapsed(t0));
}

void noise_correction() {
  const auto t0 = Clock::now();
  const Index n = 250;
  const Vector sigma2 = Vector::Constant(2, 0.25);
  const KLModel base = fixtures::kl_model(1, 26, 26, 51);
  double worst_diag = 0.0, bias_raw = 0.0, bias_corrected = 0.0;
  GramOptions leading;
  leading.components.count = 1;
  for (Index r = 0; r < 20; ++r) {
    const std::uint64_t seed = derive_seed(4004, static_cast<std::uint64_t>(r));
    const KLModel model = build_kl_model(25, base.grids[0], base.grids[1], AlphaRule{}, seed);
    const Dataset clean = simulate(model, n, seed).data;
    const Dataset noisy = add_noise(clean, {sigma2}, seed);
    const Matrix raw = gram_estimate(noisy).values;
    const Matrix corrected = gram_estimate(noisy, nullptr, sigma2, true).values;
    const double diag = (raw.diagonal() - corrected.diagonal()).mean();
    worst_diag = std::max(worst_diag, std::abs(diag - 0.5 / double(n)) / (0.5 / double(n)));

    GramOptions fixed = leading;
    fixed.noise_variance = sigma2;
    fixed.correct_diagonal = true;
    const double l_clean = gram_mfpca(clean, leading).eigenvalues(0);
    bias_raw += gram_mfpca(noisy, leading).eigenvalues(0) - l_clean;
    bias_corrected += gram_mfpca(noisy, fixed).eigenvalues(0) - l_clean;
  }
  bias_raw /= 20.0;
  bias_corrected /= 20.0;
  const double ratio = std::abs(bias_raw) / std::abs(bias_corrected);
  report(4, "noise correction", worst_diag < 1e-12 && ratio >= 5.0,
         fmt("diagonal shift rel err %.1e, bias raw %.3e, bias corrected %.3e", worst_diag, bias_raw,
             bias_corrected) +
             fmt(", ratio %.2f", ratio),
         elapsed(t0));
}

void basis_identities() {
  const auto t0 = Clock::now();
  const KLModel model = fixtures::kl_model(505, 26, 26, 51, 25);
  const Dataset ds = simulate(model, 50, 505).data;
  const BasisSystem basis = generating_basis(model);
  const Matrix w = basis_gram_W(basis);
  const double w_err = (w - Matrix::Identity(w.rows(), w.cols())).cwiseAbs().maxCoeff();

  const CoefficientMatrix c = fit_coefficients(ds, basis);
  double norm_err = 0.0;
  for (BasisSide side : {BasisSide::kGram, BasisSide::kCovariance}) {
    BasisOptions o;
    o.side = side;
    const BasisModel m = basis_mfpca_detail(c, basis, ds.obs_weights(), o);
    for (Index k = 0; k < m.coefficients.rows(); ++k) {
      const Vector b = m.coefficients.row(k).transpose();
      norm_err = std::max(norm_err, std::abs(b.dot(w * b) - 1.0));
    }
  }
  const Matrix a = build_A(c, w, ds.obs_weights());
  const Matrix gram = gram_estimate(ds).values;
  const double a_err = (a * a.transpose() - gram).cwiseAbs().maxCoeff() / gram.cwiseAbs().maxCoeff();
  report(5, "basis identities", w_err < 1e-6 && norm_err < 1e-10 && a_err < 1e-8,
         fmt("|W - I| %.1e, |b'Wb - 1| %.1e, |AA' - M| rel %.1e", w_err, norm_err, a_err), elapsed(t0));
}

void reconstruction() {
  const auto t0 = Clock::now();
  const Dataset ds = fixtures::kl_data(50, 606).data;
  const MfpcaModel m = gram_mfpca(ds);
  const double full = mrse(ds, reconstruct(m, m.n_components()));
  bool monotone = true;
  double prev = mrse(ds, reconstruct(m, 1));
  for (Index k = 2; k <= 12; ++k) {
    const double cur = mrse(ds, reconstruct(m, k));
    monotone = monotone && cur <= prev * (1.0 + 1e-12);
    prev = cur;
  }
  report(6, "reconstruction", full < 1e-10 && monotone,
         fmt("rank %.0f, MRSE at rank %.2e, monotone %.0f", double(m.n_components()), full, monotone ? 1.0 : 0.0),
         elapsed(t0));
}

double median_ratio(const ScenarioConfig& cfg, const std::string& pair) {
  for (const SummaryRow& row : summarize(run_scenario(cfg))) {
    if (row.metric == "ct_ratio" && row.pathway == pair) return row.median;
  }
  return NAN;
}

void complexity_trend() {
  const auto t0 = Clock::now();
  ScenarioConfig wide;
  wide.id = "wide";
  wide.n_obs = 50;
  wide.image_rows = 101;
  wide.image_cols = 51;
  wide.curve_points = 201;
  wide.replications = 5;
  wide.warmup = false;
  wide.pathways = {Pathway::kGram, Pathway::kCovariance};
  const double wide_ratio = median_ratio(wide, "gram/cov");

  ScenarioConfig tall = wide;
  tall.id = "tall";
  tall.n_obs = 250;
  tall.image_rows = 11;
  tall.image_cols = 11;
  tall.curve_points = 21;
  tall.warmup = true;
  const double tall_ratio = median_ratio(tall, "cov/gram");
  report(7, "complexity trend", wide_ratio < 1.0 && tall_ratio <= 1.5,
         fmt("gram/cov at N=50 M=5352: %.3f, cov/gram at N=250 M=142: %.3f", wide_ratio, tall_ratio), elapsed(t0));
}

void sparse_regime() {
  const auto t0 = Clock::now();
  ScenarioConfig cfg;
  cfg.n_obs = 250;
  cfg.image_rows = 26;
  cfg.image_cols = 26;
  cfg.curve_points = 51;
  cfg.replications = 20;
  cfg.k_retain = 1;
  cfg.warmup = false;
  cfg.pathways = {Pathway::kGram};
  auto median_ise = [&](Regime regime) {
    cfg.regime = regime;
    cfg.id = to_string(regime);
    std::vector<double> v;
    for (const RunRecord& r : run_scenario(cfg)) {
      if (r.ok()) v.push_back(r.ise(0));
    }
    return v.size() == 20 ? median(v) : NAN;
  };
  const double medium = median_ise(Regime::kSparseMedium);
  const double high = median_ise(Regime::kSparseHigh);
  report(8, "sparse regime", medium < 0.1 && high > medium,
         fmt("median ISE of phi_1: medium %.4f, high %.4f", medium, high), elapsed(t0));
}

}  // namespace

int main() {
  duality_equivalence();
  identity_suite();
  eigenvalue_recovery();
  noise_correction();
  basis_identities();
  reconstruction();
  complexity_trend();
  sparse_regime();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
