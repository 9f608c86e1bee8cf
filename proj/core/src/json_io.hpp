#pragma once

// Internal JSON (de)serialisation of shared types.

#include <nlohmann/json.hpp>

#include "censorpred/features.hpp"

namespace censorpred::detail {

nlohmann::json column_stats_json(const FeatureMatrix& m);
/// Returns names and stats; readability stats go to `readability` if present.
void parse_column_stats(const nlohmann::json& j, std::vector<std::string>& names,
                        std::vector<ColumnStats>& stats, std::optional<ReadabilityStats>& readability);

nlohmann::json feature_config_json(const FeatureConfig& config);
FeatureConfig parse_feature_config(const nlohmann::json& j);

}  // namespace censorpred::detail
