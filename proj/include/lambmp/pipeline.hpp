#pragma once

// End-to-end localization run: synthetic database -> per-path decompositions
// (first m greedy terms, tol 0) -> feature matrices -> network per method.

#include <filesystem>
#include <vector>

#include "lambmp/damage_db.hpp"
#include "lambmp/features.hpp"
#include "lambmp/io.hpp"
#include "lambmp/localize.hpp"

namespace lambmp {

struct DecomposeSettings {
    int m = 6;
    int n_funcs = 40;
    double ridge_lambda = 1e-10;
};

/// One feature row per case, decomposing every residual path with the burst as atom.
FeatureTable extract_features(const Database& db, Method method, const DecomposeSettings& settings);

std::vector<TargetRow> targets_of(const Database& db);

/// Extent of the damage grid along x and y (denominators of the relative error).
Eigen::Vector2d grid_ranges(const DatabaseConfig& config);

struct PipelineConfig {
    DatabaseConfig db;
    DecomposeSettings decompose;
    TrainConfig train;
    std::vector<Method> methods{Method::Sampm, Method::Sacmpm};
};

struct MethodResult {
    Method method = Method::Sampm;
    FeatureTable features;
    LabeledData train_data;
    LabeledData test_data;
    TrainResult trained;
    EvalReport train_report;
    EvalReport test_report;
};

struct PipelineResult {
    Database db;
    std::vector<TargetRow> targets;
    Eigen::Vector2d ranges;
    std::vector<MethodResult> methods;
};

PipelineResult run_pipeline(const PipelineConfig& config);

/// report.csv (method, coordinate, test/train error) plus scatter_<method>.csv.
void write_report(const PipelineResult& result, const std::filesystem::path& dir);

}  // namespace lambmp
