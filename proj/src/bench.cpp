#include "pddgsa/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pddgsa/errors.hpp"

namespace pddgsa {

double ishigami(const Eigen::VectorXd& x, double a, double b) {
  if (x.size() != 3) throw config_error("ishigami expects a 3-vector");
  double s1 = std::sin(x(0));
  return s1 + a * std::sin(x(1)) * std::sin(x(1)) + b * std::pow(x(2), 4) * s1;
}

Benchmark ishigami_benchmark(double a, double b) {
  Benchmark bm;
  bm.name = "ishigami";
  bm.distributions.assign(3, Distribution::uniform(-M_PI, M_PI));
  bm.evaluate = [a, b](const Eigen::VectorXd& x) { return ishigami(x, a, b); };

  const double pi4 = std::pow(M_PI, 4);
  const double pi8 = std::pow(M_PI, 8);
  double var = a * a / 8.0 + b * pi4 / 5.0 + b * b * pi8 / 18.0 + 0.5;
  double v1 = b * pi4 / 5.0 + b * b * pi8 / 50.0 + 0.5;
  double v2 = a * a / 8.0;
  double v13 = 8.0 * b * b * pi8 / 225.0;

  bm.exact_mean = a / 2.0;
  bm.exact_std = std::sqrt(var);
  bm.exact_indices[{0}] = v1 / var;
  bm.exact_indices[{1}] = v2 / var;
  bm.exact_indices[{2}] = 0.0;
  bm.exact_indices[{0, 1}] = 0.0;
  bm.exact_indices[{0, 2}] = v13 / var;
  bm.exact_indices[{1, 2}] = 0.0;
  return bm;
}

OakleyCoefficients OakleyCoefficients::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open coefficient file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed coefficient file " + path + ": " + e.what());
  }
  auto read_vec = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 15) {
      throw io_error("coefficient file missing 15-entry vector '" + std::string(key) + "'");
    }
    Eigen::VectorXd v(15);
    for (int i = 0; i < 15; ++i) v(i) = j[key][static_cast<std::size_t>(i)].get<double>();
    return v;
  };
  OakleyCoefficients c;
  c.a1 = read_vec("a1");
  c.a2 = read_vec("a2");
  c.a3 = read_vec("a3");
  if (!j.contains("M") || !j["M"].is_array() || j["M"].size() != 15) {
    throw io_error("coefficient file missing 15x15 matrix 'M'");
  }
  c.m.resize(15, 15);
  for (int r = 0; r < 15; ++r) {
    const auto& row = j["M"][static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 15) {
      throw io_error("coefficient matrix row " + std::to_string(r + 1) + " is not length 15");
    }
    for (int cidx = 0; cidx < 15; ++cidx) {
      c.m(r, cidx) = row[static_cast<std::size_t>(cidx)].get<double>();
    }
  }
  return c;
}

double oakley_ohagan(const Eigen::VectorXd& x, const OakleyCoefficients& coeffs) {
  if (x.size() != 15) throw config_error("oakley_ohagan expects a 15-vector");
  return coeffs.a1.dot(x) + coeffs.a2.dot(x.array().sin().matrix()) +
         coeffs.a3.dot(x.array().cos().matrix()) + x.dot(coeffs.m * x);
}

Benchmark oakley_benchmark(const OakleyCoefficients& coeffs) {
  Benchmark bm;
  bm.name = "oakley";
  bm.distributions.assign(15, Distribution::normal(0.0, 1.0));
  bm.evaluate = [coeffs](const Eigen::VectorXd& x) { return oakley_ohagan(x, coeffs); };
  return bm;
}

void StudyConfig::validate() const {
  if (trials < 1) throw config_error("study requires at least one trial");
  if (samples < 1) throw config_error("study requires at least one sample");
  dmorph.validate();
  for (double l : lambdas) {
    if (l < 0.0 || l > 1.0) throw config_error("lambda must lie in [0,1]");
  }
  for (int i : report_iterations) {
    if (i < 0) throw config_error("report iterations must be non-negative");
  }
  if (!lambdas.empty() && report_iterations.empty()) {
    throw config_error("report_iterations must be non-empty when lambdas are given");
  }
}

std::string index_name(const std::vector<int>& subset) {
  std::string s = "S{";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(subset[i] + 1);
  }
  return s + "}";
}

const StudyRowResult& StudyResult::row(const std::string& label) const {
  for (const auto& r : rows) {
    if (r.label == label) return r;
  }
  throw config_error("no study row labelled '" + label + "'");
}

namespace {

std::string format_lambda(double l) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", l);
  return buf;
}

void accumulate(StudyRowResult& row, const SensitivityReport& rep,
                const Benchmark& bench) {
  row.per_trial.push_back(rep);
  row.estimates["mean"].push_back(rep.mean);
  row.estimates["std"].push_back(rep.stddev);
  for (const auto& [subset, ref] : bench.exact_indices) {
    (void)ref;
    auto it = rep.indices.find(subset);
    row.estimates[index_name(subset)].push_back(
        it == rep.indices.end() ? 0.0 : it->second);
  }
}

void score(StudyRowResult& row, const Benchmark& bench) {
  auto add = [&](const std::string& name, double ref) {
    row.errors.push_back({name, ref, error_metrics(row.estimates.at(name), ref)});
  };
  add("mean", bench.exact_mean);
  add("std", bench.exact_std);
  for (const auto& [subset, ref] : bench.exact_indices) add(index_name(subset), ref);
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg, const Benchmark& bench) {
  cfg.validate();
  const int dims = bench.dims();
  BasisSet basis = enumerate_basis(dims, cfg.variate, cfg.order);
  const Eigen::Index basis_size = basis.size();
  const bool underdetermined = cfg.samples < basis_size;

  StudyResult result;
  result.config = cfg;
  if (!underdetermined) {
    result.rows.push_back({"least-squares", {}, {}, {}});
  } else {
    for (double lambda : cfg.lambdas) {
      for (int iter : cfg.report_iterations) {
        result.rows.push_back({"dmorph lambda=" + format_lambda(lambda) +
                                   " iter=" + std::to_string(iter),
                               {}, {}, {}});
      }
    }
    if (cfg.include_lasso) result.rows.push_back({"lasso", {}, {}, {}});
  }

  const int max_iter = cfg.report_iterations.empty()
                           ? 0
                           : *std::max_element(cfg.report_iterations.begin(),
                                               cfg.report_iterations.end());

  for (int trial = 0; trial < cfg.trials; ++trial) {
    try {
      std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(trial);
      TrainingSet ts;
      ts.distributions = bench.distributions;
      ts.inputs = sample_design(bench.distributions, cfg.samples, seed, cfg.sampling);
      ts.outputs.resize(cfg.samples);
      for (int l = 0; l < cfg.samples; ++l) {
        ts.outputs(l) = bench.evaluate(ts.inputs.row(l).transpose());
      }

      Eigen::MatrixXd a;
      Eigen::VectorXd b;
      design_matrix(ts, basis, a, b);

      auto report_for = [&](const Eigen::VectorXd& c) {
        return sobol_indices(PddModel(basis, c, ts.distributions));
      };

      std::size_t next_row = 0;
      if (!underdetermined) {
        accumulate(result.rows[next_row++], report_for(least_squares(a, b)), bench);
      } else {
        auto grid = default_lasso_grid(a, b, cfg.dmorph.lasso.grid_size);
        LassoCvResult cv = lasso_cv(a, b, grid, cfg.dmorph.lasso.folds, seed ^ 0xc2b2ae3d27d4eb4fULL);
        for (double lambda : cfg.lambdas) {
          DmorphConfig dc = cfg.dmorph;
          dc.lambda = lambda;
          dc.max_iterations = max_iter;
          std::vector<Eigen::VectorXd> history;
          dmorph_sparse(a, b, cv.fit.coefficients, dc, nullptr, &history);
          for (int iter : cfg.report_iterations) {
            // Early convergence keeps the last iterate fixed.
            std::size_t idx = std::min(static_cast<std::size_t>(iter), history.size() - 1);
            accumulate(result.rows[next_row++], report_for(history[idx]), bench);
          }
        }
        if (cfg.include_lasso) {
          accumulate(result.rows[next_row++], report_for(cv.fit.coefficients), bench);
        }
      }
    } catch (const std::exception& e) {
      throw numeric_error("study trial " + std::to_string(trial + 1) + " failed: " + e.what());
    }
  }

  for (auto& row : result.rows) score(row, bench);
  return result;
}

}  // namespace pddgsa
