#pragma once

// End-to-end simulation study: generate, degrade, preprocess, fit with each
// pathway, score and time. Records and summaries are written as CSV.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfpca/fdata.hpp"
#include "mfpca/mfpca_cov.hpp"
#include "mfpca/model.hpp"
#include "mfpca/simulation.hpp"

namespace mfpca {

enum class Regime { kDense, kNoisy, kSparseMedium, kSparseHigh };

const char* to_string(Regime r) noexcept;
Regime parse_regime(const std::string& name);

enum class BasisSideChoice { kAuto, kGram, kCovariance };

/// One scenario of the study. Parsed from "key = value" lines; '#' starts a
/// comment. Keys: id, n, image (e.g. 26x26), curve, regime, pathways
/// (comma list), k_true, k_retain, replications, seed, noise, threads,
/// warmup, spline_basis, divisor (n-1 | weighted), basis_side
/// (auto | gram | cov), univariate (e.g. 20,15), correct_diagonal,
/// cov_smooth_sparse.
struct ScenarioConfig {
  std::string id = "scenario";
  Index n_obs = 50;
  Index image_rows = 11;  // points on [0, 1]
  Index image_cols = 11;  // points on [0, 0.5]
  Index curve_points = 21;  // points on [-1, 1]
  Regime regime = Regime::kDense;
  std::vector<Pathway> pathways{Pathway::kGram, Pathway::kCovariance, Pathway::kBasis};
  Index k_true = 25;
  Index k_retain = 12;
  Index replications = 20;
  std::uint64_t seed = 20240607;
  double noise_variance = 0.25;  // both features
  Index threads = 1;
  bool warmup = true;
  Index spline_basis = 13;
  ScoreDivisor divisor = ScoreDivisor::kNMinusOne;
  BasisSideChoice basis_side = BasisSideChoice::kAuto;
  std::vector<Index> univariate_counts;  // empty: pathway defaults
  bool correct_diagonal = false;
  bool cov_smooth_sparse = false;

  static ScenarioConfig parse(std::istream& in);
  static ScenarioConfig from_file(const std::filesystem::path& file);
  void validate() const;

  DomainGrid image_grid() const;
  DomainGrid curve_grid() const;
};

struct RunRecord {
  std::string scenario;
  Index replication = 0;
  Pathway pathway = Pathway::kGram;
  std::string status = "ok";  // "ok" or the error kind
  std::string message;
  std::uint64_t seed = 0;
  double fit_seconds = 0.0;
  double preprocess_seconds = 0.0;
  Vector rse;
  Vector ise;
  double mrse = 0.0;
  Index selected_k = 0;
  Vector alpha;

  bool ok() const { return status == "ok"; }
};

/// One replication's data: the noiseless truth and the degraded observation.
struct ReplicationData {
  KLModel model;
  Dataset truth;
  Dataset observed;
  std::uint64_t seed;
};

ReplicationData make_replication(const ScenarioConfig& cfg, Index replication);

/// Preprocessing of one pathway for the scenario regime (dense data pass
/// through; noisy data are P-spline smoothed; sparse data are interpolated
/// for the Gram and covariance pathways and P-spline smoothed for the basis
/// pathway).
Dataset preprocess(const ScenarioConfig& cfg, Pathway pathway, const Dataset& observed);

/// Fit of one pathway on preprocessed data, keeping k_retain components.
MfpcaModel fit_pathway(const ScenarioConfig& cfg, Pathway pathway, const Dataset& data);

/// All replications and pathways; failures become records with a status.
std::vector<RunRecord> run_scenario(const ScenarioConfig& cfg);

void write_records(std::ostream& out, const std::vector<RunRecord>& records);

struct SummaryRow {
  std::string scenario;
  std::string pathway;  // "a/b" for time ratios
  std::string metric;
  Index count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Medians and quartiles per scenario, pathway and metric (rse_k, ise_k,
/// mrse, ct), plus paired fit-time ratios between pathways.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double prob);

}  // namespace mfpca
