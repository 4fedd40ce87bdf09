// End-to-end acceptance checks. Each criterion prints a single PASS/FAIL
// line; the process exits nonzero if any fail. Expects the path to the
// 15-input benchmark coefficient file as argv[1].

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pddgsa/bench.hpp"
#include "pddgsa/errors.hpp"
#include "pddgsa/gsa.hpp"
#include "pddgsa/pdd.hpp"
#include "pddgsa/regress.hpp"
#include "pddgsa/serialize.hpp"

using namespace pddgsa;

namespace {

bool g_all_pass = true;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("CRITERION %d: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) g_all_pass = false;
}

void fail(int criterion, const std::string& why) { report(criterion, false, why); }

Eigen::MatrixXd randn(int rows, int cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(gen);
  }
  return m;
}

double sigma_mre(const StudyResult& result, const std::string& label) {
  for (const auto& e : result.row(label).errors) {
    if (e.name == "std") return e.metrics.mean_relative;
  }
  throw config_error("no std error in row " + label);
}

// 1. Dense-data recovery of the Ishigami statistics by plain least squares.
void criterion1() {
  const double tol_index = 0.01;
  const double tol_zero = 0.005;
  const double tol_rel = 0.01;

  Benchmark bench = ishigami_benchmark();
  BasisSet basis = enumerate_basis(3, 2, 11);
  TrainingSet ts;
  ts.distributions = bench.distributions;
  ts.inputs = sample_design(bench.distributions, 2000, 424242,
                            SampleMethod::LatinHypercube);
  ts.outputs.resize(2000);
  for (int l = 0; l < 2000; ++l) ts.outputs(l) = bench.evaluate(ts.inputs.row(l).transpose());

  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  design_matrix(ts, basis, a, b);
  SensitivityReport rep =
      sobol_indices(PddModel(basis, least_squares(a, b), ts.distributions));

  bool pass = std::abs(rep.mean - bench.exact_mean) <= tol_rel * std::abs(bench.exact_mean) &&
              std::abs(rep.stddev - bench.exact_std) <= tol_rel * bench.exact_std;
  for (const auto& [subset, ref] : bench.exact_indices) {
    double est = rep.indices.count(subset) ? rep.indices.at(subset) : 0.0;
    pass = pass && (ref > 0.0 ? std::abs(est - ref) <= tol_index : est <= tol_zero);
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "mean %.4f vs 3.5, std %.4f vs %.4f, S1 %.4f, S2 %.4f, S13 %.4f",
                rep.mean, rep.stddev, bench.exact_std, rep.first_order(0),
                rep.first_order(1), rep.second_order(0, 2));
  report(1, pass, detail);
}

// 2 + 3. Limited-data study: the reweighted homotopy at 30 iterations beats
// the Lasso warm start on sigma MRE, and iterating improves on iteration 0.
void criteria2and3() {
  StudyConfig cfg;
  cfg.samples = 59;
  cfg.trials = 30;
  cfg.lambdas = {0.5};
  cfg.report_iterations = {0, 20, 30};
  cfg.seed_base = 20240101;

  StudyResult result = run_study(cfg, ishigami_benchmark());
  double mre0 = sigma_mre(result, "dmorph lambda=0.5 iter=0");
  double mre20 = sigma_mre(result, "dmorph lambda=0.5 iter=20");
  double mre30 = sigma_mre(result, "dmorph lambda=0.5 iter=30");
  double mre_lasso = sigma_mre(result, "lasso");

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "sigma MRE iter0 %.4f, iter20 %.4f, iter30 %.4f, lasso %.4f",
                mre0, mre20, mre30, mre_lasso);
  report(2, mre30 <= 0.14 && mre30 < mre_lasso, detail);
  report(3, mre30 < mre0, detail);
}

// 4. 15-input study: with M=337 the homotopy beats Lasso for every blend
// weight, and at M=788 every method improves. References come from the
// pick-freeze oracle.
void criterion4(const std::string& coeff_path) {
  Benchmark bench = oakley_benchmark(OakleyCoefficients::load(coeff_path));
  SensitivityReport ref =
      mc_sobol_oracle(bench.evaluate, bench.distributions, 1000000, 91);
  bench.exact_mean = ref.mean;
  bench.exact_std = ref.stddev;
  for (const auto& [subset, v] : ref.indices) bench.exact_indices[subset] = v;

  StudyConfig cfg;
  cfg.benchmark = "oakley";
  cfg.variate = 2;
  cfg.order = 5;
  cfg.trials = 20;
  cfg.lambdas = {0.2, 0.6, 1.0};
  cfg.report_iterations = {15};
  cfg.dmorph.max_iterations = 15;
  cfg.seed_base = 20240301;

  cfg.samples = 337;
  StudyResult small = run_study(cfg, bench);
  cfg.samples = 788;
  StudyResult large = run_study(cfg, bench);

  std::vector<std::string> dmorph_rows = {"dmorph lambda=0.2 iter=15",
                                          "dmorph lambda=0.6 iter=15",
                                          "dmorph lambda=1 iter=15"};
  double lasso_small = sigma_mre(small, "lasso");
  bool beats_lasso = true;
  bool shrinks = sigma_mre(large, "lasso") < lasso_small;
  std::string detail = "M=337 sigma MRE:";
  for (const auto& label : dmorph_rows) {
    double s = sigma_mre(small, label);
    beats_lasso = beats_lasso && s < lasso_small;
    shrinks = shrinks && sigma_mre(large, label) < s;
    char buf[48];
    std::snprintf(buf, sizeof(buf), " %.4f", s);
    detail += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), " vs lasso %.4f; M=788 improves: %s",
                lasso_small, shrinks ? "yes" : "no");
  detail += buf;
  report(4, beats_lasso && shrinks, detail);
}

// 5. Always-on numerical properties on random systems.
void criterion5() {
  bool pass = true;
  std::string why = "all properties hold";
  auto check = [&](bool ok, const char* what) {
    if (!ok && pass) {
      pass = false;
      why = what;
    }
  };

  for (unsigned seed : {1u, 2u, 3u}) {
    Eigen::MatrixXd a = randn(10, 40, seed);
    Eigen::VectorXd b = randn(10, 1, seed + 50);
    Eigen::MatrixXd p = pseudoinverse(a);
    check((a * p * a - a).cwiseAbs().maxCoeff() <= 1e-8 &&
              (p * a * p - p).cwiseAbs().maxCoeff() <= 1e-8 &&
              ((a * p) - (a * p).transpose()).cwiseAbs().maxCoeff() <= 1e-8 &&
              ((p * a) - (p * a).transpose()).cwiseAbs().maxCoeff() <= 1e-8,
          "Moore-Penrose conditions");

    Eigen::MatrixXd phi = null_projector(a, p);
    check((phi * phi - phi).cwiseAbs().maxCoeff() <= 1e-8 &&
              (phi - phi.transpose()).cwiseAbs().maxCoeff() <= 1e-8,
          "projector idempotence/symmetry");

    // Homotopy limit vs an independently factorized KKT system.
    Eigen::MatrixXd w = randn(40, 40, seed + 100);
    Eigen::MatrixXd d = w * w.transpose() + 0.5 * Eigen::MatrixXd::Identity(40, 40);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(50, 50);
    kkt.topLeftCorner(40, 40) = d;
    kkt.topRightCorner(40, 10) = a.transpose();
    kkt.bottomLeftCorner(10, 40) = a;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(50);
    rhs.tail(10) = b;
    Eigen::VectorXd qp = Eigen::FullPivLU<Eigen::MatrixXd>(kkt).solve(rhs).head(40);
    check((dmorph_original(a, b, d) - qp).cwiseAbs().maxCoeff() <= 1e-6,
          "weighted homotopy vs QP oracle");

    Eigen::VectorXd c0 = randn(40, 1, seed + 150);
    rhs.head(40) = c0;
    kkt.topLeftCorner(40, 40) = Eigen::MatrixXd::Identity(40, 40);
    Eigen::VectorXd closest = Eigen::FullPivLU<Eigen::MatrixXd>(kkt).solve(rhs).head(40);
    check((dmorph_initial(a, b, c0) - closest).cwiseAbs().maxCoeff() <= 1e-6,
          "closest manifold point vs KKT oracle");

    DmorphConfig cfg;
    cfg.max_iterations = 10;
    std::vector<Eigen::VectorXd> history;
    dmorph_sparse(a, b, least_squares(a, b) + 0.1 * c0, cfg, nullptr, &history);
    for (const auto& it : history) {
      check((a * it - b).norm() / b.norm() <= 1e-6, "manifold residual");
    }

    // Lasso stationarity.
    double k = 1.0;
    LassoResult lr = lasso(a, b, k);
    Eigen::VectorXd grad = a.transpose() * (b - a * lr.coefficients);
    for (int j = 0; j < 40; ++j) {
      if (lr.coefficients(j) == 0.0) {
        check(std::abs(grad(j)) <= k / 2.0 + 1e-6, "lasso KKT (inactive)");
      } else {
        check(std::abs(grad(j) - (lr.coefficients(j) > 0 ? 1.0 : -1.0) * k / 2.0) <= 1e-6,
              "lasso KKT (active)");
      }
    }
  }

  // Index normalization and scaling invariance.
  std::vector<Distribution> dists(3, Distribution::uniform(-M_PI, M_PI));
  BasisSet basis = enumerate_basis(3, 2, 6);
  Eigen::VectorXd c = randn(static_cast<int>(basis.size()), 1, 77);
  SensitivityReport rep = sobol_indices(PddModel(basis, c, dists));
  SensitivityReport scaled = sobol_indices(PddModel(basis, 5.0 * c, dists));
  double sum = 0.0;
  for (const auto& [subset, s] : rep.indices) {
    sum += s;
    check(std::abs(scaled.indices.at(subset) - s) <= 1e-12, "scaling invariance");
  }
  check(std::abs(sum - 1.0) <= 1e-10, "index normalization");

  report(5, pass, pass ? why : "violated: " + why);
}

// 6. The large multiphysics case is out of desk-scale reach; its structural
// stand-in is the 15-input underdetermined study (criterion 4) plus a CSV
// round trip through the full pipeline on a synthetic 5-input function.
void criterion6() {
  std::vector<Distribution> dists(5, Distribution::uniform(-1.0, 1.0));
  auto f = [](const Eigen::VectorXd& x) {
    return 2.0 * x(0) + x(1) * x(1) + 0.5 * std::sin(M_PI * x(2)) + x(0) * x(3) +
           0.25 * x(4);
  };

  BasisSet basis = enumerate_basis(5, 2, 11);  // 606 terms, M=195 samples
  TrainingSet ts;
  ts.distributions = dists;
  ts.inputs = sample_design(dists, 195, 555, SampleMethod::LatinHypercube);
  ts.outputs.resize(195);
  for (int l = 0; l < 195; ++l) ts.outputs(l) = f(ts.inputs.row(l).transpose());

  std::string dir = "acceptance_artifacts";
  std::filesystem::create_directories(dir);
  std::string csv = dir + "/synthetic5.csv";
  {
    std::ofstream out(csv);
    out << "x1,x2,x3,x4,x5,y\n";
    char buf[40];
    for (int l = 0; l < 195; ++l) {
      for (int j = 0; j < 5; ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g,", ts.inputs(l, j));
        out << buf;
      }
      std::snprintf(buf, sizeof(buf), "%.17g\n", ts.outputs(l));
      out << buf;
    }
  }

  TrainingSet back = read_training_csv(csv, dists);
  bool pass = (back.inputs - ts.inputs).cwiseAbs().maxCoeff() == 0.0 &&
              (back.outputs - ts.outputs).cwiseAbs().maxCoeff() == 0.0;

  DmorphConfig cfg;
  auto [model, diag] = fit(back, basis, cfg, 9);
  pass = pass && diag.underdetermined && diag.basis_size == 606;

  // Model JSON round trip must reproduce the in-memory report bit for bit.
  std::string model_path = dir + "/synthetic5_model.json";
  save_json_file(model_path, to_json(model));
  SensitivityReport direct = sobol_indices(model);
  SensitivityReport loaded = sobol_indices(model_from_json(load_json_file(model_path)));
  pass = pass && direct.mean == loaded.mean && direct.stddev == loaded.stddev;
  for (const auto& [subset, s] : direct.indices) {
    pass = pass && loaded.indices.at(subset) == s;
  }

  // The fit itself should be sensible: dominant main effect on x1.
  pass = pass && direct.first_order(0) > 0.3;

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "CSV+model round trip exact, underdetermined 195x606 fit, "
                "S1 %.3f (large case substituted by criterion 4)",
                direct.first_order(0));
  report(6, pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::string coeff_path = argc > 1 ? argv[1] : "data/oakley_coefficients.json";
  struct Step {
    int id;
    std::function<void()> run;
  };
  std::vector<Step> steps = {{1, criterion1},
                             {2, criteria2and3},
                             {5, criterion5},
                             {6, criterion6},
                             {4, [&] { criterion4(coeff_path); }}};
  for (auto& step : steps) {
    try {
      step.run();
    } catch (const std::exception& e) {
      fail(step.id, std::string("exception: ") + e.what());
      if (step.id == 2) fail(3, "same study failed");
    }
  }
  return g_all_pass ? 0 : 1;
}
