#include "mfpca/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "mfpca/io.hpp"
#include "mfpca/metrics.hpp"
#include "mfpca/mfpca_basis.hpp"
#include "mfpca/mfpca_gram.hpp"
#include "mfpca/rng.hpp"
#include "mfpca/smoothing.hpp"

namespace mfpca {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Index parse_index(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<Index>(x);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kInvalidArgument, "'" + key + "' expects an integer, got '" + v + "'");
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kInvalidArgument, "'" + key + "' expects a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::kInvalidArgument, "'" + key + "' expects a boolean, got '" + v + "'");
}

std::string join(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_double(v(i));
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

Index spline_size_for(const DomainGrid& grid, Index wanted) {
  // A spline needs at least degree + 1 functions; tiny grids get fewer.
  Index smallest_axis = grid.axis(0).size();
  for (Index d = 1; d < grid.dimension(); ++d) smallest_axis = std::min(smallest_axis, grid.axis(d).size());
  return std::max<Index>(4, std::min(wanted, smallest_axis));
}

BasisSystem spline_system(const ScenarioConfig& cfg, const Dataset& data) {
  BasisSystem sys;
  for (const DomainGrid& g : data.grids()) {
    const BSplineBasis b(g, spline_size_for(g, cfg.spline_basis));
    sys.grids.push_back(g);
    sys.functions.push_back(Matrix(b.design()).transpose());
  }
  return sys;
}

Dataset smooth_each(const ScenarioConfig& cfg, const Dataset& ds) {
  std::vector<FeatureBlock> blocks;
  for (const FeatureBlock& f : ds.features()) {
    const BSplineBasis basis(f.grid(), spline_size_for(f.grid(), cfg.spline_basis));
    blocks.push_back(psplines_smooth(f, basis, PenaltySpec::gcv()));
  }
  return Dataset(std::move(blocks), ds.obs_weights());
}

RunRecord score(const ScenarioConfig& cfg, const ReplicationData& rep, const MfpcaModel& model) {
  RunRecord r;
  const Index k = std::min(cfg.k_retain, model.n_components());
  r.selected_k = k;
  r.rse = rse(rep.model.eigenvalues.head(k), model.eigenvalues.head(k));
  r.ise.resize(k);
  for (Index i = 0; i < k; ++i) r.ise(i) = ise(rep.truth.grids(), rep.model.eigenfunction(i), model.eigenfunction(i));
  r.mrse = mrse(rep.truth, reconstruct(model, k));
  return r;
}

std::vector<RunRecord> run_replication(const ScenarioConfig& cfg, Index replication, bool record) {
  std::vector<RunRecord> out;
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(replication));
  auto failure = [&](Pathway p, const std::string& status, const std::string& msg, const Vector& alpha) {
    RunRecord r;
    r.scenario = cfg.id;
    r.replication = replication;
    r.pathway = p;
    r.status = status;
    r.message = msg;
    r.seed = seed;
    r.alpha = alpha;
    return r;
  };

  std::optional<ReplicationData> rep;
  try {
    rep = make_replication(cfg, replication);
  } catch (const Error& e) {
    for (Pathway p : cfg.pathways) out.push_back(failure(p, to_string(e.kind()), e.what(), Vector()));
    return out;
  }

  for (Pathway p : cfg.pathways) {
    try {
      auto t0 = Clock::now();
      const Dataset data = preprocess(cfg, p, rep->observed);
      const double prep = seconds_since(t0);
      t0 = Clock::now();
      const MfpcaModel model = fit_pathway(cfg, p, data);
      const double fit = seconds_since(t0);
      if (!record) continue;
      RunRecord r = score(cfg, *rep, model);
      r.scenario = cfg.id;
      r.replication = replication;
      r.pathway = p;
      r.seed = rep->seed;
      r.fit_seconds = fit;
      r.preprocess_seconds = prep;
      r.alpha = rep->model.alpha;
      out.push_back(std::move(r));
    } catch (const Error& e) {
      if (record) out.push_back(failure(p, to_string(e.kind()), e.what(), rep->model.alpha));
    }
  }
  return out;
}

}  // namespace

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::kDense: return "dense";
    case Regime::kNoisy: return "noisy";
    case Regime::kSparseMedium: return "sparse-medium";
    case Regime::kSparseHigh: return "sparse-high";
  }
  return "unknown";
}

Regime parse_regime(const std::string& name) {
  if (name == "dense") return Regime::kDense;
  if (name == "noisy") return Regime::kNoisy;
  if (name == "sparse-medium" || name == "medium") return Regime::kSparseMedium;
  if (name == "sparse-high" || name == "high") return Regime::kSparseHigh;
  throw Error(ErrorKind::kInvalidArgument, "unknown regime '" + name + "'");
}

ScenarioConfig ScenarioConfig::parse(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key == "id") {
      cfg.id = v;
    } else if (key == "n") {
      cfg.n_obs = parse_index(key, v);
    } else if (key == "image") {
      const auto parts = split(v, 'x');
      if (parts.size() != 2) throw Error(ErrorKind::kInvalidArgument, "image expects <rows>x<cols>");
      cfg.image_rows = parse_index(key, parts[0]);
      cfg.image_cols = parse_index(key, parts[1]);
    } else if (key == "curve") {
      cfg.curve_points = parse_index(key, v);
    } else if (key == "regime") {
      cfg.regime = parse_regime(v);
    } else if (key == "pathways") {
      cfg.pathways.clear();
      for (const std::string& p : split(v, ',')) cfg.pathways.push_back(parse_pathway(p));
    } else if (key == "k_true") {
      cfg.k_true = parse_index(key, v);
    } else if (key == "k_retain") {
      cfg.k_retain = parse_index(key, v);
    } else if (key == "replications") {
      cfg.replications = parse_index(key, v);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_index(key, v));
    } else if (key == "noise") {
      cfg.noise_variance = parse_real(key, v);
    } else if (key == "threads") {
      cfg.threads = parse_index(key, v);
    } else if (key == "warmup") {
      cfg.warmup = parse_bool(key, v);
    } else if (key == "spline_basis") {
      cfg.spline_basis = parse_index(key, v);
    } else if (key == "divisor") {
      if (v == "n-1") cfg.divisor = ScoreDivisor::kNMinusOne;
      else if (v == "weighted" || v == "n") cfg.divisor = ScoreDivisor::kWeighted;
      else throw Error(ErrorKind::kInvalidArgument, "divisor expects n-1 or weighted");
    } else if (key == "basis_side") {
      if (v == "auto") cfg.basis_side = BasisSideChoice::kAuto;
      else if (v == "gram") cfg.basis_side = BasisSideChoice::kGram;
      else if (v == "cov" || v == "covariance") cfg.basis_side = BasisSideChoice::kCovariance;
      else throw Error(ErrorKind::kInvalidArgument, "basis_side expects auto, gram or cov");
    } else if (key == "univariate") {
      cfg.univariate_counts.clear();
      for (const std::string& c : split(v, ',')) cfg.univariate_counts.push_back(parse_index(key, c));
    } else if (key == "correct_diagonal") {
      cfg.correct_diagonal = parse_bool(key, v);
    } else if (key == "cov_smooth_sparse") {
      cfg.cov_smooth_sparse = parse_bool(key, v);
    } else {
      throw Error(ErrorKind::kInvalidArgument, "unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + file.string());
  return parse(in);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::kInvalidArgument, m); };
  if (n_obs < 2) fail("n must be at least 2");
  if (image_rows < 2 || image_cols < 2 || curve_points < 2) fail("grids need at least 2 points per axis");
  if (k_true < 1 || k_true > 25) fail("k_true must lie in [1, 25]");
  if (k_retain < 1 || k_retain > k_true) fail("k_retain must lie in [1, k_true]");
  if (replications < 1) fail("replications must be positive");
  if (threads < 1) fail("threads must be positive");
  if (noise_variance < 0.0) fail("noise must be nonnegative");
  if (spline_basis < 4) fail("spline_basis must be at least 4");
  if (pathways.empty()) fail("no pathway selected");
  if (!univariate_counts.empty() && univariate_counts.size() != 2) fail("univariate expects two counts");
}

DomainGrid ScenarioConfig::image_grid() const { return DomainGrid::uniform2d(0.0, 1.0, image_rows, 0.0, 0.5, image_cols); }

DomainGrid ScenarioConfig::curve_grid() const { return DomainGrid::uniform(-1.0, 1.0, curve_points); }

ReplicationData make_replication(const ScenarioConfig& cfg, Index replication) {
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(replication));
  KLModel model = build_kl_model(cfg.k_true, cfg.image_grid(), cfg.curve_grid(), AlphaRule{}, seed);
  Simulated sim = simulate(model, cfg.n_obs, seed);
  Dataset observed = sim.data;
  switch (cfg.regime) {
    case Regime::kDense:
      break;
    case Regime::kNoisy:
      observed = add_noise(sim.data, {Vector::Constant(2, cfg.noise_variance)}, seed);
      break;
    case Regime::kSparseMedium:
      observed = sparsify(sim.data, SparsityRegime::medium(), seed);
      break;
    case Regime::kSparseHigh:
      observed = sparsify(sim.data, SparsityRegime::high(), seed);
      break;
  }
  return {std::move(model), std::move(sim.data), std::move(observed), seed};
}

Dataset preprocess(const ScenarioConfig& cfg, Pathway pathway, const Dataset& observed) {
  switch (cfg.regime) {
    case Regime::kDense:
      return observed;
    case Regime::kNoisy:
      return smooth_each(cfg, observed);
    case Regime::kSparseMedium:
    case Regime::kSparseHigh:
      if (pathway == Pathway::kBasis) return smooth_each(cfg, observed);
      if (pathway == Pathway::kCovariance && cfg.cov_smooth_sparse) return smooth_each(cfg, interpolate(observed));
      return interpolate(observed);
  }
  return observed;
}

MfpcaModel fit_pathway(const ScenarioConfig& cfg, Pathway pathway, const Dataset& data) {
  ComponentRequest request;
  request.count = cfg.k_retain;
  const Vector noise = Vector::Constant(data.n_features(), cfg.noise_variance);
  const bool correct = cfg.correct_diagonal && cfg.regime == Regime::kNoisy;
  switch (pathway) {
    case Pathway::kGram: {
      GramOptions opt;
      opt.components = request;
      if (correct) {
        opt.noise_variance = noise;
        opt.correct_diagonal = true;
      }
      return gram_mfpca(data, opt);
    }
    case Pathway::kCovariance: {
      CovOptions opt;
      opt.components = request;
      opt.divisor = cfg.divisor;
      opt.univariate_counts = cfg.univariate_counts;
      if (correct) opt.noise_variance = noise;
      return cov_mfpca(data, opt);
    }
    case Pathway::kBasis: {
      const BasisSystem sys = spline_system(cfg, data);
      BasisOptions opt;
      opt.components = request;
      const bool gram_side = cfg.basis_side == BasisSideChoice::kGram ||
                             (cfg.basis_side == BasisSideChoice::kAuto && data.n_obs() <= sys.total_size());
      opt.side = gram_side ? BasisSide::kGram : BasisSide::kCovariance;
      return basis_mfpca(data, sys, opt);
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown pathway");
}

std::vector<RunRecord> run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.warmup) run_replication(cfg, 0, false);

  std::vector<std::vector<RunRecord>> per_rep(static_cast<std::size_t>(cfg.replications));
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (Index r = next++; r < cfg.replications; r = next++) {
      per_rep[static_cast<std::size_t>(r)] = run_replication(cfg, r, true);
    }
  };
  const Index n_threads = std::min(cfg.threads, cfg.replications);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (Index t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  std::vector<RunRecord> out;
  for (auto& v : per_rep) {
    for (RunRecord& r : v) out.push_back(std::move(r));
  }
  return out;
}

void write_records(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "scenario,replication,pathway,status,seed,fit_seconds,preprocess_seconds,selected_k,mrse,rse,ise,alpha,message\n";
  for (const RunRecord& r : records) {
    out << csv_escape(r.scenario) << ',' << r.replication << ',' << to_string(r.pathway) << ','
        << csv_escape(r.status) << ',' << r.seed << ',' << format_double(r.fit_seconds) << ','
        << format_double(r.preprocess_seconds) << ',' << r.selected_k << ',' << format_double(r.mrse) << ','
        << join(r.rse) << ',' << join(r.ise) << ',' << join(r.alpha) << ',' << csv_escape(r.message) << '\n';
  }
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "probability outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, std::vector<double>> samples;
  // scenario -> replication -> pathway -> fit seconds
  std::map<std::string, std::map<Index, std::map<std::string, double>>> times;
  for (const RunRecord& r : records) {
    if (!r.ok()) continue;
    const std::string p = to_string(r.pathway);
    for (Index k = 0; k < r.rse.size(); ++k) samples[{r.scenario, p, "rse_" + std::to_string(k + 1)}].push_back(r.rse(k));
    for (Index k = 0; k < r.ise.size(); ++k) samples[{r.scenario, p, "ise_" + std::to_string(k + 1)}].push_back(r.ise(k));
    samples[{r.scenario, p, "mrse"}].push_back(r.mrse);
    samples[{r.scenario, p, "ct"}].push_back(r.fit_seconds);
    times[r.scenario][r.replication][p] = r.fit_seconds;
  }
  for (const auto& [scenario, reps] : times) {
    std::map<std::pair<std::string, std::string>, std::vector<double>> ratios;
    for (const auto& [rep, by_path] : reps) {
      for (const auto& [a, ta] : by_path) {
        for (const auto& [b, tb] : by_path) {
          if (tb > 0.0) ratios[{a, b}].push_back(ta / tb);
        }
      }
    }
    for (auto& [pair, v] : ratios) samples[{scenario, pair.first + "/" + pair.second, "ct_ratio"}] = std::move(v);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, v] : samples) {
    SummaryRow row;
    std::tie(row.scenario, row.pathway, row.metric) = key;
    row.count = static_cast<Index>(v.size());
    row.median = quantile(v, 0.5);
    row.q1 = quantile(v, 0.25);
    row.q3 = quantile(v, 0.75);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "scenario,pathway,metric,count,median,q1,q3\n";
  for (const SummaryRow& r : rows) {
    out << csv_escape(r.scenario) << ',' << r.pathway << ',' << r.metric << ',' << r.count << ','
        << format_double(r.median) << ',' << format_double(r.q1) << ',' << format_double(r.q3) << '\n';
  }
}

}  // namespace mfpca
