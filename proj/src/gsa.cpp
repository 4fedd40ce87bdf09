#include "pddgsa/gsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pddgsa/errors.hpp"
#include "pddgsa/measures.hpp"

namespace pddgsa {

double SensitivityReport::first_order(int var) const {
  auto it = indices.find({var});
  return it == indices.end() ? 0.0 : it->second;
}

double SensitivityReport::second_order(int var_a, int var_b) const {
  if (var_a > var_b) std::swap(var_a, var_b);
  auto it = indices.find({var_a, var_b});
  return it == indices.end() ? 0.0 : it->second;
}

std::pair<double, double> moments(const PddModel& model) {
  double mean = model.coefficients(0);
  double variance = model.coefficients.tail(model.coefficients.size() - 1).squaredNorm();
  return {mean, variance};
}

SensitivityReport sobol_indices(const PddModel& model) {
  auto [mean, variance] = moments(model);
  SensitivityReport rep;
  rep.mean = mean;
  rep.stddev = std::sqrt(variance);
  rep.total_effect.assign(static_cast<std::size_t>(model.basis.dims), 0.0);

  if (variance <= 0.0) {
    rep.degenerate = true;
    for (Eigen::Index i = 1; i < model.basis.size(); ++i) {
      rep.indices.emplace(model.basis.terms[static_cast<std::size_t>(i)].vars, 0.0);
    }
    return rep;
  }

  for (Eigen::Index i = 1; i < model.basis.size(); ++i) {
    const auto& term = model.basis.terms[static_cast<std::size_t>(i)];
    double c = model.coefficients(i);
    rep.indices[term.vars] += c * c / variance;
  }
  for (const auto& [subset, s] : rep.indices) {
    for (int var : subset) rep.total_effect[static_cast<std::size_t>(var)] += s;
  }
  return rep;
}

SensitivityReport mc_sobol_oracle(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::vector<Distribution>& dists, int n, std::uint64_t seed) {
  if (n < 100) throw config_error("oracle requires at least 100 samples");
  const int dims = static_cast<int>(dists.size());

  Eigen::MatrixXd xa = sample_design(dists, n, seed, SampleMethod::MonteCarlo);
  Eigen::MatrixXd xb = sample_design(dists, n, seed + 0x5851f42d4c957f2dULL,
                                     SampleMethod::MonteCarlo);

  auto eval_rows = [&](const Eigen::MatrixXd& x) {
    Eigen::VectorXd y(n);
    for (int l = 0; l < n; ++l) {
      y(l) = f(x.row(l).transpose());
      if (!std::isfinite(y(l))) {
        throw numeric_error("non-finite function output in oracle sample");
      }
    }
    return y;
  };
  Eigen::VectorXd fa = eval_rows(xa);
  Eigen::VectorXd fb = eval_rows(xb);

  const double nn = 2.0 * n;
  double mean = (fa.sum() + fb.sum()) / nn;
  double var = ((fa.array() - mean).square().sum() +
                (fb.array() - mean).square().sum()) / (nn - 1.0);

  SensitivityReport rep;
  rep.mean = mean;
  rep.stddev = std::sqrt(std::max(var, 0.0));
  rep.total_effect.assign(static_cast<std::size_t>(dims), 0.0);
  if (var <= 0.0) {
    rep.degenerate = true;
    for (int i = 0; i < dims; ++i) rep.indices[{i}] = 0.0;
    return rep;
  }

  Eigen::MatrixXd xab = xa;
  auto clip01 = [](double s) { return std::clamp(s, 0.0, 1.0); };
  for (int i = 0; i < dims; ++i) {
    xab.col(i) = xb.col(i);
    Eigen::VectorXd fab = eval_rows(xab);
    xab.col(i) = xa.col(i);
    double first = fb.dot(fab - fa) / (static_cast<double>(n) * var);
    double total = (fa - fab).squaredNorm() / (2.0 * n * var);
    rep.indices[{i}] = clip01(first);
    rep.total_effect[static_cast<std::size_t>(i)] = clip01(total);
  }
  return rep;
}

ErrorMetrics error_metrics(const std::vector<double>& estimates, double exact) {
  if (estimates.empty()) throw config_error("error metrics need at least one trial");
  ErrorMetrics m;
  for (double e : estimates) m.mean_absolute += std::abs(exact - e);
  m.mean_absolute /= static_cast<double>(estimates.size());
  if (exact == 0.0) {
    m.relative_defined = false;
    m.mean_relative = std::numeric_limits<double>::quiet_NaN();
  } else {
    m.mean_relative = m.mean_absolute / std::abs(exact);
  }
  return m;
}

}  // namespace pddgsa
