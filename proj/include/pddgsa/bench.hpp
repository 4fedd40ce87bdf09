#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pddgsa/gsa.hpp"
#include "pddgsa/regress.hpp"

namespace pddgsa {

// An analytic test function with its input model and whatever reference
// values are available for scoring (exact where known, otherwise filled in
// from the Monte Carlo oracle by the caller).
struct Benchmark {
  std::string name;
  std::vector<Distribution> distributions;
  std::function<double(const Eigen::VectorXd&)> evaluate;
  double exact_mean = 0.0;
  double exact_std = 0.0;
  std::map<std::vector<int>, double> exact_indices;  // 0-based subsets

  int dims() const { return static_cast<int>(distributions.size()); }
};

double ishigami(const Eigen::VectorXd& x, double a = 7.0, double b = 0.1);
Benchmark ishigami_benchmark(double a = 7.0, double b = 0.1);

struct OakleyCoefficients {
  Eigen::VectorXd a1, a2, a3;  // 15 each
  Eigen::MatrixXd m;           // 15 x 15

  static OakleyCoefficients load(const std::string& path);
};

double oakley_ohagan(const Eigen::VectorXd& x, const OakleyCoefficients& coeffs);
// References are left unset; fill them from mc_sobol_oracle before scoring.
Benchmark oakley_benchmark(const OakleyCoefficients& coeffs);

struct StudyConfig {
  std::string benchmark = "ishigami";
  int variate = 2;
  int order = 11;
  int samples = 59;
  int trials = 30;
  std::vector<double> lambdas = {0.5};
  std::vector<int> report_iterations = {0, 20, 30};
  bool include_lasso = true;
  DmorphConfig dmorph;
  SampleMethod sampling = SampleMethod::LatinHypercube;
  std::uint64_t seed_base = 20240101;

  void validate() const;
};

struct StudyQuantityError {
  std::string name;
  double reference = 0.0;
  ErrorMetrics metrics;
};

struct StudyRowResult {
  std::string label;
  std::vector<SensitivityReport> per_trial;
  std::map<std::string, std::vector<double>> estimates;  // quantity -> per-trial
  std::vector<StudyQuantityError> errors;
};

struct StudyResult {
  StudyConfig config;
  std::vector<StudyRowResult> rows;

  const StudyRowResult& row(const std::string& label) const;
};

// Human-readable quantity name for a 0-based subset, e.g. "S{1,3}".
std::string index_name(const std::vector<int>& subset);

// Replicated experiment: per trial draw a fresh design, evaluate the
// benchmark, fit with each configured method, and score the sensitivity
// estimates against the benchmark references. Rows share the per-trial
// data and Lasso solution. Deterministic in seed_base.
StudyResult run_study(const StudyConfig& cfg, const Benchmark& bench);

}  // namespace pddgsa
