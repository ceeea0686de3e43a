// SPDX-License-Identifier: Apache-2.0
//
// qed — estimate distribution functions from truncated-censored samples,
// run simulation studies, compare estimators and build decrement tables.
//
// Exit codes: 0 ok, 1 usage or data error, 2 estimator did not converge,
// 3 degeneracy flags present.

#include <CLI11.hpp>
#include <filesystem>

#include "qed/io.hpp"

namespace fs = std::filesystem;
using qed::io::json;

namespace {

struct CommonOpts {
  double tol = 1e-9;
  int max_iter = 10000;
  double trunc_guard = 1e-8;
  std::string variant = "eq20";
  std::string grid = "auto";
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--tol", o.tol, "Convergence threshold (L-inf change)");
  cmd->add_option("--max-iter", o.max_iter, "Iteration cap");
  cmd->add_option("--trunc-guard", o.trunc_guard,
                  "Degeneracy guard: clamp P(T_k) at 1 - guard");
  cmd->add_option("--variant", o.variant, "Fixed-point variant: eq20|eq22")
      ->check(CLI::IsMember({"eq20", "eq22"}));
  cmd->add_option("--grid", o.grid,
                  "Estimation grid: 'auto' or a file with one atom per line");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--jobs", o.jobs, "Worker threads for replications");
  cmd->add_option("--out-dir", o.out_dir,
                  "Output directory (default $QED_OUT_DIR or '.')");
}

fs::path resolve_out_dir(const CommonOpts& o) {
  std::string dir = o.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("QED_OUT_DIR")) dir = env;
  }
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

qed::EstimatorConfig estimator_config(const CommonOpts& o) {
  qed::EstimatorConfig cfg;
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.trunc_guard = o.trunc_guard;
  cfg.variant = o.variant == "eq22" ? qed::EstimatorConfig::Variant::eq22
                                    : qed::EstimatorConfig::Variant::eq20;
  cfg.validate();
  return cfg;
}

std::string plain_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return os;
}

int exit_code_for(const qed::FitResult& fr) {
  if (!fr.converged) return 2;
  if (!fr.degenerate.empty()) return 3;
  return 0;
}

int run_estimate(const std::string& input, const std::string& records_mode,
                 const CommonOpts& opts) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  fs::path out = resolve_out_dir(opts);
  qed::EstimatorConfig cfg = estimator_config(opts);

  std::vector<qed::Observation> obs;
  std::optional<qed::Grid> grid;
  if (records_mode == "employee") {
    auto records = qed::io::read_employee_csv(in);
    auto dataset = qed::build_employee_dataset(records);
    if (dataset.skipped > 0) {
      std::cerr << "warning: skipped " << dataset.skipped
                << " records outside the observation window\n";
    }
    obs = std::move(dataset.observations);
    grid = std::move(dataset.grid);
  } else if (records_mode == "joint") {
    for (const auto& r : qed::io::read_joint_life_csv(in)) {
      obs.push_back(qed::joint_life_regions(r));
    }
  } else {
    obs = qed::io::read_observations_csv(in);
  }
  if (opts.grid != "auto") {
    std::ifstream gf(opts.grid);
    if (!gf) throw std::runtime_error("cannot open grid file " + opts.grid);
    std::vector<double> atoms;
    double v;
    while (gf >> v) atoms.push_back(v);
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    grid = qed::Grid::univariate(std::move(atoms));
  }

  qed::FitResult fr = grid ? qed::fit(obs, *grid, cfg) : qed::fit(obs, cfg);
  open_out(out / "estimate.json") << qed::io::fit_to_json(fr).dump(2) << "\n";
  auto cdf = open_out(out / "estimate_cdf.csv");
  qed::io::write_cdf_csv(cdf, fr.estimate);
  std::cout << "estimate: " << fr.iterations << " iterations, residual "
            << fr.final_residual << ", adjusted n " << fr.adjusted_n << "\n";
  return exit_code_for(fr);
}

int run_simulate(const std::string& config_path, const CommonOpts& opts) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open " + config_path);
  json j = json::parse(in);
  auto spec = qed::io::simulation_spec_from_json(j);
  if (spec.dists.size() != 1) {
    throw std::runtime_error("simulate expects exactly one distribution");
  }
  fs::path out = resolve_out_dir(opts);

  qed::StudyConfig cfg;
  cfg.dist = spec.dists[0];
  cfg.mix = spec.mix;
  if (spec.calibrate) {
    qed::Rng rng(spec.seed ^ 0xCA11B8A7Eull);
    cfg.mix = qed::calibrate_mix(cfg.dist, cfg.mix, *spec.calibrate, rng);
  }
  cfg.n = spec.n;
  cfg.replications = spec.replications;
  cfg.estimators = spec.estimators;
  cfg.seed = opts.seed != 1 ? opts.seed : spec.seed;
  cfg.estimator = spec.estimator;
  if (opts.tol != 1e-9) cfg.estimator.tol = opts.tol;
  cfg.jobs = opts.jobs;
  cfg.collect_curves = !spec.band_alphas.empty();

  qed::StudyResult result = qed::run_study(cfg);
  {
    auto os = open_out(out / "replications.csv");
    qed::io::write_replications_csv(os, result);
  }
  std::vector<qed::SummaryRow> rows;
  for (qed::EstimatorKind k : cfg.estimators) {
    rows.push_back(result.summary(k));
  }
  {
    auto os = open_out(out / "summary.csv");
    qed::io::write_summary_csv(os, rows);
  }
  for (double alpha : spec.band_alphas) {
    auto band = result.band(qed::EstimatorKind::qed, alpha);
    auto os = open_out(out / ("bands_" + plain_number(alpha) + ".csv"));
    qed::io::write_bands_csv(os, result.lattice, band,
                             [&](double x) { return cfg.dist.cdf(x); });
  }
  std::cout << "simulate: " << cfg.replications << " replications x "
            << cfg.estimators.size() << " estimators written to " << out
            << "\n";
  return 0;
}

int run_compare(const std::string& config_path, const CommonOpts& opts) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open " + config_path);
  json j = json::parse(in);
  auto spec = qed::io::simulation_spec_from_json(j);
  if (spec.estimators.size() < 2) {
    throw std::runtime_error("compare needs at least two estimators");
  }
  fs::path out = resolve_out_dir(opts);

  std::vector<qed::StudyResult> arms;
  for (const auto& dist : spec.dists) {
    qed::StudyConfig cfg;
    cfg.dist = dist;
    cfg.mix = spec.mix;
    if (spec.calibrate) {
      qed::Rng rng(spec.seed ^ 0xCA11B8A7Eull);
      cfg.mix = qed::calibrate_mix(cfg.dist, cfg.mix, *spec.calibrate, rng);
    }
    cfg.n = spec.n;
    cfg.replications = spec.replications;
    cfg.estimators = spec.estimators;
    cfg.seed = opts.seed != 1 ? opts.seed : spec.seed;
    cfg.estimator = spec.estimator;
    cfg.jobs = opts.jobs;
    arms.push_back(qed::run_study(cfg));
  }
  auto os = open_out(out / "compare.csv");
  qed::io::write_compare_csv(os, arms);
  std::cout << "compare: " << arms.size() << " arms written to " << out << "\n";
  return 0;
}

int run_tables(const std::string& input, std::vector<double> hire_ages,
               double age_step, double service_step, const CommonOpts& opts) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  fs::path out = resolve_out_dir(opts);
  qed::EstimatorConfig cfg = estimator_config(opts);

  auto records = qed::io::read_employee_csv(in);
  auto dataset = qed::build_employee_dataset(records);
  if (dataset.skipped > 0) {
    std::cerr << "warning: skipped " << dataset.skipped
              << " records outside the observation window\n";
  }
  qed::FitResult fr = qed::fit(dataset.observations, dataset.grid, cfg);
  open_out(out / "estimate.json") << qed::io::fit_to_json(fr).dump(2) << "\n";
  {
    auto os = open_out(out / "bivariate_cdf.csv");
    qed::io::write_matrix_csv(
        os, qed::cdf_table(fr.estimate, age_step, service_step));
  }
  if (hire_ages.empty()) hire_ages = {20, 30, 40, 50, 60, 70};
  for (double h : hire_ages) {
    try {
      auto cond = qed::selection_table(fr.estimate, h, service_step);
      auto os = open_out(out / ("selection_" + plain_number(h) + ".csv"));
      qed::io::write_conditional_csv(os, cond);
    } catch (const std::exception& e) {
      std::cerr << "warning: stratum at hire age " << h << " skipped: "
                << e.what() << "\n";
    }
  }
  std::cout << "tables written to " << out << "\n";
  return exit_code_for(fr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Nonparametric distribution estimation for truncated-censored data"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string input, config_path, records_mode = "none";
  std::vector<double> hire_ages;
  double age_step = 2.0, service_step = 4.0;

  CLI::App* est = app.add_subcommand(
      "estimate", "Fit the distribution estimator to an observation file");
  est->add_option("input", input, "Observation CSV (or record CSV with --records)")
      ->required();
  est->add_option("--records", records_mode,
                  "Treat input as a record file: employee|joint")
      ->check(CLI::IsMember({"employee", "joint"}));
  add_common(est, opts);

  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a replication study from a JSON config");
  sim->add_option("config", config_path, "Study configuration (JSON)")
      ->required();
  add_common(sim, opts);

  CLI::App* cmp = app.add_subcommand(
      "compare", "Compare estimator accuracy across distributions");
  cmp->add_option("config", config_path, "Study configuration (JSON)")
      ->required();
  add_common(cmp, opts);

  CLI::App* tab = app.add_subcommand(
      "tables", "Build decrement tables from employee records");
  tab->add_option("input", input, "Employee record CSV")->required();
  tab->add_option("--hire-ages", hire_ages,
                  "Hire ages for selection tables (default 20..70 by 10)");
  tab->add_option("--age-step", age_step, "Age step of the emitted table");
  tab->add_option("--service-step", service_step,
                  "Service step of the emitted table");
  add_common(tab, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return run_estimate(input, records_mode, opts);
    if (sim->parsed()) return run_simulate(config_path, opts);
    if (cmp->parsed()) return run_compare(config_path, opts);
    if (tab->parsed()) return run_tables(input, hire_ages, age_step,
                                         service_step, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
