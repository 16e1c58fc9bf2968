// mfpca_cli: simulate datasets, fit one pathway, run the simulation study,
// or print the duality diagnostics of a dataset.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mfpca/bench.hpp"
#include "mfpca/geometry.hpp"
#include "mfpca/io.hpp"
#include "mfpca/smoothing.hpp"

namespace fs = std::filesystem;
using namespace mfpca;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string pathways;
  std::optional<Index> replications;
  std::optional<Index> threads;
};

ScenarioConfig load_config(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? ScenarioConfig{} : ScenarioConfig::from_file(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.replications) cfg.replications = *c.replications;
  if (c.threads) cfg.threads = *c.threads;
  if (!c.pathways.empty()) {
    std::istringstream in("pathways = " + c.pathways);
    const ScenarioConfig tmp = ScenarioConfig::parse(in);
    cfg.pathways = tmp.pathways;
  }
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, Common& c, bool with_pathways) {
  app->add_option("--config", c.config, "scenario file (key = value lines)");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--replications", c.replications, "number of replications");
  app->add_option("--threads", c.threads, "worker threads for replications");
  if (with_pathways) app->add_option("--pathways", c.pathways, "comma list of gram, cov, basis");
}

int cmd_simulate(const Common& c, Index replication) {
  const ScenarioConfig cfg = load_config(c);
  const ReplicationData rep = make_replication(cfg, replication);
  const fs::path out(c.out);
  write_dataset(out / "observed", rep.observed);
  write_dataset(out / "truth", rep.truth);
  write_kl_model(out / "kl_model.csv", rep.model);
  std::cout << "wrote replication " << replication << " (seed " << rep.seed << ") to " << out << '\n';
  return 0;
}

int cmd_fit(const Common& c, const std::string& data_dir, const std::string& pathway) {
  ScenarioConfig cfg = load_config(c);
  const Dataset ds = read_dataset(data_dir);
  const Pathway p = parse_pathway(pathway);
  const Dataset prepared = preprocess(cfg, p, ds);
  const MfpcaModel model = fit_pathway(cfg, p, prepared);
  write_model(c.out, model);
  std::cout << to_string(p) << ": " << model.n_components() << " components";
  if (model.n_components() > 0) std::cout << ", lambda_1 = " << model.eigenvalues(0);
  std::cout << '\n';
  return 0;
}

int cmd_bench(const Common& c) {
  const ScenarioConfig cfg = load_config(c);
  const std::vector<RunRecord> records = run_scenario(cfg);
  const fs::path out(c.out);
  fs::create_directories(out);
  std::ofstream rec(out / "records.csv");
  write_records(rec, records);
  std::ofstream sum(out / "summary.csv");
  write_summary(sum, summarize(records));
  Index failed = 0;
  for (const RunRecord& r : records) failed += r.ok() ? 0 : 1;
  std::cout << records.size() << " records (" << failed << " failed) in " << out << '\n';
  return 0;
}

int cmd_diagnose(const Common& c, const std::string& data_dir, Index trials) {
  Dataset ds = data_dir.empty() ? make_replication(load_config(c), 0).truth : read_dataset(data_dir);
  if (!ds.is_dense()) ds = interpolate(ds);
  const InertiaReport report = inertia_report(ds);
  const double adjoint = check_adjoint(ds, trials, c.seed.value_or(1));
  const fs::path out(c.out);
  fs::create_directories(out);
  std::ofstream csv(out / "diagnostics.csv");
  write_report(std::cout, csv, report, adjoint);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate functional PCA: Gram, covariance and basis pathways"};
  app.require_subcommand(1);

  Common sim_opts, fit_opts, bench_opts, diag_opts;
  Index replication = 0;
  auto* sim = app.add_subcommand("simulate", "write one simulated replication as CSV");
  add_common(sim, sim_opts, false);
  sim->add_option("--replication", replication, "replication index");

  std::string data_dir, pathway = "gram";
  auto* fit = app.add_subcommand("fit", "fit one pathway to a dataset directory");
  add_common(fit, fit_opts, false);
  fit->add_option("--data", data_dir, "dataset directory")->required();
  fit->add_option("--pathway", pathway, "gram, cov or basis");

  auto* bench = app.add_subcommand("bench", "run a scenario and write records.csv and summary.csv");
  add_common(bench, bench_opts, true);

  std::string diag_data;
  Index trials = 10;
  auto* diag = app.add_subcommand("diagnose", "inertia identities and adjoint residual of a dataset");
  add_common(diag, diag_opts, false);
  diag->add_option("--data", diag_data, "dataset directory (default: simulate from the config)");
  diag->add_option("--trials", trials, "random pairs for the adjoint check");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(sim_opts, replication);
    if (*fit) return cmd_fit(fit_opts, data_dir, pathway);
    if (*bench) return cmd_bench(bench_opts);
    if (*diag) return cmd_diagnose(diag_opts, diag_data, trials);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
