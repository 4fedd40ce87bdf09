// Command line front end: sample designs, fit surrogates from CSV data,
// extract sensitivity reports, and run replicated benchmark studies.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "pddgsa/bench.hpp"
#include "pddgsa/errors.hpp"
#include "pddgsa/gsa.hpp"
#include "pddgsa/pdd.hpp"
#include "pddgsa/regress.hpp"
#include "pddgsa/serialize.hpp"

namespace {

using namespace pddgsa;

// Shared problem description for the sample and fit commands.
struct ProblemConfig {
  std::vector<Distribution> distributions;
  int variate = 2;
  int order = 11;
  DmorphConfig dmorph;
};

ProblemConfig load_problem(const std::string& path) {
  nlohmann::json j = load_json_file(path);
  ProblemConfig cfg;
  if (!j.contains("distributions") || !j["distributions"].is_array() ||
      j["distributions"].empty()) {
    throw config_error("config needs a non-empty 'distributions' array");
  }
  for (const auto& d : j["distributions"]) {
    cfg.distributions.push_back(distribution_from_json(d));
  }
  cfg.variate = j.value("variate", cfg.variate);
  cfg.order = j.value("order", cfg.order);
  if (cfg.variate < 1 || cfg.variate > static_cast<int>(cfg.distributions.size())) {
    throw config_error("variate must lie in [1, N]");
  }
  if (cfg.order < cfg.variate) throw config_error("order must be >= variate");
  if (j.contains("dmorph")) cfg.dmorph = dmorph_config_from_json(j["dmorph"]);
  return cfg;
}

int cmd_sample(const std::string& config_path, int samples, std::uint64_t seed,
               const std::string& sampling, const std::string& out, bool quiet) {
  ProblemConfig cfg = load_problem(config_path);
  if (samples < 1) throw config_error("--samples must be positive");
  SampleMethod method;
  if (sampling == "lhs") {
    method = SampleMethod::LatinHypercube;
  } else if (sampling == "mc") {
    method = SampleMethod::MonteCarlo;
  } else {
    throw config_error("--sampling must be lhs or mc");
  }
  Eigen::MatrixXd design = sample_design(cfg.distributions, samples, seed, method);
  write_design_csv(out, design);
  if (!quiet) {
    std::cout << "wrote " << samples << " x " << cfg.distributions.size()
              << " design to " << out << "\n";
  }
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& data_path,
            const std::string& out, const std::string& method, double lambda,
            int iterations, std::uint64_t seed, bool quiet) {
  ProblemConfig cfg = load_problem(config_path);
  if (lambda >= 0.0) cfg.dmorph.lambda = lambda;
  if (iterations >= 0) cfg.dmorph.max_iterations = iterations;
  cfg.dmorph.validate();

  TrainingSet ts = read_training_csv(data_path, cfg.distributions);
  BasisSet basis = enumerate_basis(static_cast<int>(cfg.distributions.size()),
                                   cfg.variate, cfg.order);

  PddModel model;
  FitDiagnostics diag;
  diag.basis_size = basis.size();
  diag.sample_count = ts.outputs.size();
  diag.underdetermined = ts.outputs.size() < basis.size();

  if (method == "dmorph") {
    std::tie(model, diag) = fit(ts, basis, cfg.dmorph, seed);
  } else {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    design_matrix(ts, basis, a, b);
    Eigen::VectorXd c;
    if (method == "ls") {
      c = least_squares(a, b);
    } else if (method == "lasso") {
      auto grid = default_lasso_grid(a, b, cfg.dmorph.lasso.grid_size);
      LassoCvResult cv = lasso_cv(a, b, grid, cfg.dmorph.lasso.folds, seed);
      c = cv.fit.coefficients;
      diag.lasso_penalty = cv.penalty;
      diag.lasso_converged = cv.fit.converged;
    } else {
      throw config_error("--method must be ls, lasso, or dmorph");
    }
    diag.residual_norm = (a * c - b).norm();
    model = PddModel(std::move(basis), std::move(c), cfg.distributions);
  }

  nlohmann::json j = to_json(model);
  j["diagnostics"] = to_json(diag);
  save_json_file(out, j);
  if (!quiet) {
    std::cout << (diag.underdetermined ? "underdetermined" : "overdetermined")
              << " fit (" << diag.sample_count << " samples, " << diag.basis_size
              << " basis terms), residual " << diag.residual_norm << "\n"
              << "model written to " << out << "\n";
  }
  return 0;
}

int cmd_analyze(const std::string& model_path, const std::string& out, bool quiet) {
  PddModel model = model_from_json(load_json_file(model_path));
  SensitivityReport rep = sobol_indices(model);
  save_json_file(out, to_json(rep));
  std::string csv_path = std::filesystem::path(out).replace_extension(".csv").string();
  write_report_csv(csv_path, rep);
  if (!quiet) {
    std::printf("mean %.6g, std %.6g%s\n", rep.mean, rep.stddev,
                rep.degenerate ? " (degenerate: zero variance)" : "");
    for (const auto& [subset, v] : rep.indices) {
      if (v != 0.0) std::printf("%-8s %.6g\n", index_name(subset).c_str(), v);
    }
    std::cout << "report written to " << out << " and " << csv_path << "\n";
  }
  return 0;
}

int cmd_benchmark(const std::string& config_path, const std::string& out_dir,
                  int trials, std::uint64_t seed, bool seed_set, bool quiet) {
  nlohmann::json j = load_json_file(config_path);
  StudyConfig cfg = study_config_from_json(j);
  if (trials > 0) cfg.trials = trials;
  if (seed_set) cfg.seed_base = seed;

  Benchmark bench;
  if (cfg.benchmark == "ishigami") {
    bench = ishigami_benchmark();
  } else if (cfg.benchmark == "oakley") {
    std::string coeff_path = j.value("coefficients", std::string());
    if (coeff_path.empty()) {
      throw config_error("oakley study needs a 'coefficients' file path");
    }
    bench = oakley_benchmark(OakleyCoefficients::load(coeff_path));
    int oracle_n = j.value("oracle_samples", 1000000);
    std::uint64_t oracle_seed = j.value("oracle_seed", std::uint64_t{91});
    if (!quiet) std::cout << "estimating references with " << oracle_n << " oracle samples...\n";
    SensitivityReport ref = mc_sobol_oracle(bench.evaluate, bench.distributions,
                                            oracle_n, oracle_seed);
    bench.exact_mean = ref.mean;
    bench.exact_std = ref.stddev;
    for (const auto& [subset, v] : ref.indices) bench.exact_indices[subset] = v;
  } else {
    throw config_error("unknown benchmark: " + cfg.benchmark);
  }

  StudyResult result = run_study(cfg, bench);

  std::filesystem::create_directories(out_dir);
  std::string csv_path = (std::filesystem::path(out_dir) / "summary.csv").string();
  std::string json_path = (std::filesystem::path(out_dir) / "trials.json").string();
  write_study_csv(csv_path, result);
  save_json_file(json_path, to_json(result));
  if (!quiet) {
    std::cout << "study: " << cfg.benchmark << ", " << cfg.samples << " samples, "
              << cfg.trials << " trials\n";
    for (const auto& row : result.rows) {
      const auto* std_err = &row.errors[1];
      std::printf("  %-28s std MRE %s\n", row.label.c_str(),
                  std_err->metrics.relative_defined
                      ? std::to_string(std_err->metrics.mean_relative).c_str()
                      : "n/a");
    }
    std::cout << "wrote " << csv_path << " and " << json_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial surrogate training and variance-based sensitivity analysis"};
  app.require_subcommand(1);

  std::string config, data, out, model, sampling = "lhs", method = "dmorph";
  std::uint64_t seed = 0;
  int samples = 0, trials = 0, iterations = -1;
  double lambda = -1.0;
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress stdout summaries");

  auto* sc_sample = app.add_subcommand("sample", "draw a design of input points");
  sc_sample->add_option("--config", config, "problem config JSON")->required();
  sc_sample->add_option("--samples", samples, "number of design points")->required();
  sc_sample->add_option("--seed", seed, "RNG seed");
  sc_sample->add_option("--sampling", sampling, "lhs or mc");
  sc_sample->add_option("--out", out, "output CSV path")->required();

  auto* sc_fit = app.add_subcommand("fit", "train a surrogate from CSV data");
  sc_fit->add_option("--config", config, "problem config JSON")->required();
  sc_fit->add_option("--data", data, "training CSV (x1..xN,y)")->required();
  sc_fit->add_option("--out", out, "output model JSON path")->required();
  sc_fit->add_option("--method", method, "ls, lasso, or dmorph");
  sc_fit->add_option("--lambda", lambda, "homotopy blend weight in [0,1]");
  sc_fit->add_option("--iterations", iterations, "reweighting iterations");
  sc_fit->add_option("--seed", seed, "cross-validation fold seed");

  auto* sc_analyze = app.add_subcommand("analyze", "sensitivity report from a model");
  sc_analyze->add_option("--model", model, "model JSON path")->required();
  sc_analyze->add_option("--out", out, "output report JSON path")->required();

  auto* sc_bench = app.add_subcommand("benchmark", "replicated accuracy study");
  sc_bench->add_option("--config", config, "study config JSON")->required();
  sc_bench->add_option("--out", out, "output directory")->required();
  sc_bench->add_option("--trials", trials, "override trial count");
  auto* seed_opt = sc_bench->add_option("--seed", seed, "override seed base");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (sc_sample->parsed()) return cmd_sample(config, samples, seed, sampling, out, quiet);
    if (sc_fit->parsed()) return cmd_fit(config, data, out, method, lambda, iterations, seed, quiet);
    if (sc_analyze->parsed()) return cmd_analyze(model, out, quiet);
    return cmd_benchmark(config, out, trials, seed, seed_opt->count() > 0, quiet);
  } catch (const pddgsa::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const pddgsa::io_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const pddgsa::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
