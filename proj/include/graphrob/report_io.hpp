#ifndef GRAPHROB_REPORT_IO_HPP
#define GRAPHROB_REPORT_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "graphrob/harness.hpp"

namespace graphrob {

nlohmann::ordered_json split_to_json(const Split& split);
Split split_from_json(const nlohmann::json& j, const LabeledDataset& ds);

nlohmann::ordered_json attack_result_to_json(const AttackResult& res);

/// Model checkpoint: shapes, flags and flattened weights at full precision.
nlohmann::ordered_json model_to_json(const VictimModel& model);

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::ordered_json report_to_json(const ExperimentReport& report);

/// CSV with header "p,mean_budget,stderr,trials".
std::string curve_to_csv(const RobustnessCurve& curve);

/// Per grid point, the largest mean budget across reports (the best defense
/// envelope). Rows carry the winning report's label.
std::string merge_reports_csv(const std::vector<nlohmann::json>& reports,
                              const std::vector<std::string>& labels);

}  // namespace graphrob

#endif
