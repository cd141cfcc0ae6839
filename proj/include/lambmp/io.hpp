#pragma once

// File formats: decomposition and model JSON, feature-matrix and target CSVs.

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lambmp/damage_db.hpp"
#include "lambmp/features.hpp"
#include "lambmp/localize.hpp"
#include "lambmp/sacmpm.hpp"
#include "lambmp/sampm.hpp"

namespace lambmp {

nlohmann::json to_json(const SampmDecomposition& d);
nlohmann::json to_json(const SacmpmDecomposition& d);

std::vector<SampmTerm> sampm_terms_from_json(const nlohmann::json& j);
std::vector<SacmpmTerm> sacmpm_terms_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NNModel& model);
NNModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

struct FeatureTable {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;  ///< one row per damage case
    FeatureSchema schema;
};

/// Writes `label,<columns...>` rows plus a companion `<stem>.schema.json`.
void write_feature_table(const std::filesystem::path& csv, const FeatureTable& table);
FeatureTable read_feature_table(const std::filesystem::path& csv);
std::filesystem::path schema_path_for(const std::filesystem::path& csv);

struct TargetRow {
    std::string label;
    double x_m = 0.0;
    double y_m = 0.0;
    Split split = Split::Train;
};

void write_targets(const std::filesystem::path& csv, const std::vector<TargetRow>& rows);
std::vector<TargetRow> read_targets(const std::filesystem::path& csv);

/// Rows of `table` joined to `targets` by label, restricted to one split.
struct LabeledData {
    std::vector<std::string> labels;
    Eigen::MatrixXd features;
    Eigen::MatrixXd targets;  ///< n x 2, meters
};
LabeledData join(const FeatureTable& table, const std::vector<TargetRow>& targets, Split split);

}  // namespace lambmp
