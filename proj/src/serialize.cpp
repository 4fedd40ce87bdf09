#include "pddgsa/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pddgsa/errors.hpp"

namespace pddgsa {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string subset_key(const std::vector<int>& subset) {
  std::string s;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(subset[i] + 1);
  }
  return s;
}

std::vector<int> subset_from_key(const std::string& key) {
  std::vector<int> subset;
  std::stringstream ss(key);
  std::string tok;
  while (std::getline(ss, tok, ',')) subset.push_back(std::stoi(tok) - 1);
  return subset;
}

double parse_double(const std::string& cell, int row, int col) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw io_error("non-numeric cell at row " + std::to_string(row) + ", column " +
                   std::to_string(col));
  }
  return v;
}

}  // namespace

nlohmann::json to_json(const Distribution& d) {
  if (d.kind == DistKind::Uniform) {
    return {{"kind", "uniform"}, {"lower", d.p1}, {"upper", d.p2}};
  }
  return {{"kind", "normal"}, {"mean", d.p1}, {"std", d.p2}};
}

Distribution distribution_from_json(const nlohmann::json& j) {
  try {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") {
      return Distribution::uniform(j.at("lower").get<double>(), j.at("upper").get<double>());
    }
    if (kind == "normal") {
      return Distribution::normal(j.at("mean").get<double>(), j.at("std").get<double>());
    }
    throw config_error("unknown distribution kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad distribution JSON: ") + e.what());
  }
}

nlohmann::json to_json(const DmorphConfig& cfg) {
  nlohmann::json j{{"lambda", cfg.lambda},
                   {"epsilon", cfg.epsilon},
                   {"max_iterations", cfg.max_iterations},
                   {"convergence_tol", cfg.convergence_tol},
                   {"enforce_fit", cfg.enforce_fit},
                   {"lasso", {{"folds", cfg.lasso.folds}, {"grid_size", cfg.lasso.grid_size}}}};
  if (cfg.rank_tol > 0.0) {
    j["rank_tol"] = cfg.rank_tol;
  } else {
    j["rank_tol"] = nullptr;
  }
  return j;
}

DmorphConfig dmorph_config_from_json(const nlohmann::json& j) {
  DmorphConfig cfg;
  try {
    cfg.lambda = j.value("lambda", cfg.lambda);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
    cfg.convergence_tol = j.value("convergence_tol", cfg.convergence_tol);
    cfg.enforce_fit = j.value("enforce_fit", cfg.enforce_fit);
    if (j.contains("rank_tol") && !j["rank_tol"].is_null()) {
      cfg.rank_tol = j["rank_tol"].get<double>();
    }
    if (j.contains("lasso")) {
      cfg.lasso.folds = j["lasso"].value("folds", cfg.lasso.folds);
      cfg.lasso.grid_size = j["lasso"].value("grid_size", cfg.lasso.grid_size);
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad solver config JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const FitDiagnostics& d) {
  return {{"residual_norm", d.residual_norm},
          {"iterations", d.iterations},
          {"coefficient_change", d.coefficient_change},
          {"cost_history", d.cost_history},
          {"cost_at_start", d.cost_at_start},
          {"underdetermined", d.underdetermined},
          {"lasso_penalty", d.lasso_penalty},
          {"lasso_converged", d.lasso_converged},
          {"basis_size", d.basis_size},
          {"sample_count", d.sample_count}};
}

nlohmann::json to_json(const PddModel& model) {
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& term : model.basis.terms) {
    nlohmann::json vars = nlohmann::json::array();
    for (int v : term.vars) vars.push_back(v + 1);
    basis.push_back({{"vars", vars}, {"degrees", term.degrees}});
  }
  nlohmann::json dists = nlohmann::json::array();
  for (const auto& d : model.distributions) dists.push_back(to_json(d));
  std::vector<double> coeffs(model.coefficients.data(),
                             model.coefficients.data() + model.coefficients.size());
  return {{"dims", model.basis.dims},
          {"variate", model.basis.variate},
          {"order", model.basis.order},
          {"distributions", dists},
          {"basis", basis},
          {"coefficients", coeffs}};
}

PddModel model_from_json(const nlohmann::json& j) {
  try {
    BasisSet basis;
    basis.dims = j.at("dims").get<int>();
    basis.variate = j.at("variate").get<int>();
    basis.order = j.at("order").get<int>();
    for (const auto& t : j.at("basis")) {
      BasisTerm term;
      for (const auto& v : t.at("vars")) term.vars.push_back(v.get<int>() - 1);
      term.degrees = t.at("degrees").get<std::vector<int>>();
      if (term.vars.size() != term.degrees.size()) {
        throw config_error("basis term vars/degrees length mismatch");
      }
      basis.terms.push_back(std::move(term));
    }
    std::vector<Distribution> dists;
    for (const auto& d : j.at("distributions")) dists.push_back(distribution_from_json(d));
    auto coeffs = j.at("coefficients").get<std::vector<double>>();
    Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(coeffs.data(),
                                                    static_cast<Eigen::Index>(coeffs.size()));
    return PddModel(std::move(basis), std::move(c), std::move(dists));
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("bad model JSON: ") + e.what());
  }
}

nlohmann::json to_json(const SensitivityReport& rep) {
  nlohmann::json first = nlohmann::json::object();
  nlohmann::json second = nlohmann::json::object();
  nlohmann::json higher = nlohmann::json::object();
  for (const auto& [subset, v] : rep.indices) {
    if (subset.size() == 1) {
      first[subset_key(subset)] = v;
    } else if (subset.size() == 2) {
      second[subset_key(subset)] = v;
    } else {
      higher[subset_key(subset)] = v;
    }
  }
  nlohmann::json total = nlohmann::json::object();
  for (std::size_t i = 0; i < rep.total_effect.size(); ++i) {
    total[std::to_string(i + 1)] = rep.total_effect[i];
  }
  nlohmann::json j{{"mean", rep.mean},       {"std", rep.stddev},
                   {"first_order", first},   {"second_order", second},
                   {"total_effect", total},  {"trials", rep.trials},
                   {"degenerate", rep.degenerate}};
  if (!higher.empty()) j["higher_order"] = higher;
  return j;
}

SensitivityReport report_from_json(const nlohmann::json& j) {
  try {
    SensitivityReport rep;
    rep.mean = j.at("mean").get<double>();
    rep.stddev = j.at("std").get<double>();
    rep.trials = j.value("trials", 1);
    rep.degenerate = j.value("degenerate", false);
    for (const char* key : {"first_order", "second_order", "higher_order"}) {
      if (!j.contains(key)) continue;
      for (const auto& [k, v] : j[key].items()) {
        rep.indices[subset_from_key(k)] = v.get<double>();
      }
    }
    if (j.contains("total_effect")) {
      rep.total_effect.resize(j["total_effect"].size(), 0.0);
      for (const auto& [k, v] : j["total_effect"].items()) {
        rep.total_effect[static_cast<std::size_t>(std::stoi(k) - 1)] = v.get<double>();
      }
    }
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("bad report JSON: ") + e.what());
  }
}

nlohmann::json to_json(const StudyConfig& cfg) {
  return {{"benchmark", cfg.benchmark},
          {"variate", cfg.variate},
          {"order", cfg.order},
          {"samples", cfg.samples},
          {"trials", cfg.trials},
          {"lambdas", cfg.lambdas},
          {"report_iterations", cfg.report_iterations},
          {"include_lasso", cfg.include_lasso},
          {"dmorph", to_json(cfg.dmorph)},
          {"sampling", cfg.sampling == SampleMethod::LatinHypercube ? "lhs" : "mc"},
          {"seed_base", cfg.seed_base}};
}

StudyConfig study_config_from_json(const nlohmann::json& j) {
  StudyConfig cfg;
  try {
    cfg.benchmark = j.value("benchmark", cfg.benchmark);
    cfg.variate = j.value("variate", cfg.variate);
    cfg.order = j.value("order", cfg.order);
    cfg.samples = j.value("samples", cfg.samples);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.lambdas = j.value("lambdas", cfg.lambdas);
    cfg.report_iterations = j.value("report_iterations", cfg.report_iterations);
    cfg.include_lasso = j.value("include_lasso", cfg.include_lasso);
    if (j.contains("dmorph")) cfg.dmorph = dmorph_config_from_json(j["dmorph"]);
    std::string sampling = j.value("sampling", std::string("lhs"));
    if (sampling == "lhs") {
      cfg.sampling = SampleMethod::LatinHypercube;
    } else if (sampling == "mc") {
      cfg.sampling = SampleMethod::MonteCarlo;
    } else {
      throw config_error("unknown sampling method: " + sampling);
    }
    cfg.seed_base = j.value("seed_base", cfg.seed_base);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad study config JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const StudyResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) {
    nlohmann::json errors = nlohmann::json::array();
    for (const auto& e : row.errors) {
      nlohmann::json je{{"name", e.name},
                        {"reference", e.reference},
                        {"mae", e.metrics.mean_absolute}};
      if (e.metrics.relative_defined) {
        je["mre"] = e.metrics.mean_relative;
      } else {
        je["mre"] = nullptr;
      }
      errors.push_back(je);
    }
    rows.push_back({{"label", row.label}, {"errors", errors}, {"estimates", row.estimates}});
  }
  return {{"config", to_json(result.config)}, {"rows", rows}};
}

TrainingSet read_training_csv(const std::string& path,
                              const std::vector<Distribution>& dists) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open data file: " + path);
  const int dims = static_cast<int>(dists.size());

  std::string line;
  if (!std::getline(in, line)) throw io_error("empty data file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string expected;
  for (int j = 0; j < dims; ++j) expected += "x" + std::to_string(j + 1) + ",";
  expected += "y";
  if (line != expected) {
    throw io_error("unexpected CSV header (want '" + expected + "', got '" + line + "')");
  }

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      row.push_back(parse_double(cell, lineno, col));
    }
    if (static_cast<int>(row.size()) != dims + 1) {
      throw io_error("wrong column count at row " + std::to_string(lineno) + " (want " +
                     std::to_string(dims + 1) + ", got " + std::to_string(row.size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error("data file has no sample rows: " + path);

  TrainingSet ts;
  ts.distributions = dists;
  ts.inputs.resize(static_cast<Eigen::Index>(rows.size()), dims);
  ts.outputs.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t l = 0; l < rows.size(); ++l) {
    for (int jcol = 0; jcol < dims; ++jcol) {
      ts.inputs(static_cast<Eigen::Index>(l), jcol) = rows[l][static_cast<std::size_t>(jcol)];
    }
    ts.outputs(static_cast<Eigen::Index>(l)) = rows[l][static_cast<std::size_t>(dims)];
  }
  ts.validate();
  return ts;
}

void write_design_csv(const std::string& path, const Eigen::MatrixXd& design) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write: " + path);
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    out << (j ? "," : "") << "x" << (j + 1);
  }
  out << "\n";
  for (Eigen::Index l = 0; l < design.rows(); ++l) {
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
      out << (j ? "," : "") << fmt17(design(l, j));
    }
    out << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_report_csv(const std::string& path, const SensitivityReport& rep) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write: " + path);
  out << "name,value\n";
  out << "mean," << fmt17(rep.mean) << "\n";
  out << "std," << fmt17(rep.stddev) << "\n";
  for (const auto& [subset, v] : rep.indices) {
    out << index_name(subset) << "," << fmt17(v) << "\n";
  }
  for (std::size_t i = 0; i < rep.total_effect.size(); ++i) {
    out << "T{" << (i + 1) << "}," << fmt17(rep.total_effect[i]) << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_study_csv(const std::string& path, const StudyResult& result) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write: " + path);
  out << "method";
  if (!result.rows.empty()) {
    for (const auto& e : result.rows.front().errors) {
      out << "," << e.name << "_mre," << e.name << "_mae";
    }
  }
  out << "\n";
  for (const auto& row : result.rows) {
    out << row.label;
    for (const auto& e : row.errors) {
      out << ",";
      if (e.metrics.relative_defined) out << fmt17(e.metrics.mean_relative);
      out << "," << fmt17(e.metrics.mean_absolute);
    }
    out << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed JSON in " + path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace pddgsa
