#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "pddgsa/pdd.hpp"

namespace pddgsa {

// Variance decomposition of a model or sampled function. Subset keys are
// 0-based, strictly increasing variable index lists.
struct SensitivityReport {
  double mean = 0.0;
  double stddev = 0.0;
  std::map<std::vector<int>, double> indices;  // Sobol index per subset
  std::vector<double> total_effect;            // one entry per variable
  bool degenerate = false;  // zero output variance; all indices forced to 0
  int trials = 1;

  double first_order(int var) const;
  double second_order(int var_a, int var_b) const;
};

// mean = c_1, variance = sum of squared non-constant coefficients.
std::pair<double, double> moments(const PddModel& model);

SensitivityReport sobol_indices(const PddModel& model);

// Independent pick-freeze Monte Carlo estimator: Sobol'-Saltelli for
// first-order indices, Jansen for total effects. Costs n * (N + 2)
// evaluations of f.
SensitivityReport mc_sobol_oracle(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::vector<Distribution>& dists, int n, std::uint64_t seed);

struct ErrorMetrics {
  double mean_absolute = 0.0;
  double mean_relative = 0.0;
  bool relative_defined = true;  // false when the reference value is zero
};

ErrorMetrics error_metrics(const std::vector<double>& estimates, double exact);

}  // namespace pddgsa
