#pragma once

#include <json.hpp>
#include <string>

#include "pddgsa/bench.hpp"
#include "pddgsa/gsa.hpp"
#include "pddgsa/pdd.hpp"
#include "pddgsa/regress.hpp"

namespace pddgsa {

nlohmann::json to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DmorphConfig& cfg);
DmorphConfig dmorph_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FitDiagnostics& d);

// Model persistence keeps the full basis descriptor (1-based variable
// indices) so analysis never re-derives term ordering.
nlohmann::json to_json(const PddModel& model);
PddModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SensitivityReport& rep);
SensitivityReport report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StudyConfig& cfg);
StudyConfig study_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StudyResult& result);

// CSV schema: header "x1,...,xN,y", one sample per row.
TrainingSet read_training_csv(const std::string& path,
                              const std::vector<Distribution>& dists);
void write_design_csv(const std::string& path, const Eigen::MatrixXd& design);
void write_report_csv(const std::string& path, const SensitivityReport& rep);
// One row per method, one MAE/MRE column pair per scored quantity.
void write_study_csv(const std::string& path, const StudyResult& result);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace pddgsa
