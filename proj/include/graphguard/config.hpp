#pragma once

#include <json.hpp>

#include "graphguard/adaptive.hpp"
#include "graphguard/attack.hpp"
#include "graphguard/explainer.hpp"
#include "graphguard/gnn.hpp"
#include "graphguard/graph.hpp"

namespace graphguard {

// Where the data comes from. kind: "synth-bench" (generated in memory),
// "tu" (TUDataset text files under path/name) or "json" (serialized form).
struct DatasetSpec {
    std::string kind = "synth-bench";
    std::string path;
    std::string name = "synth-bench";
    FeatureMode feature_mode = FeatureMode::kDegreeOnehot;
    int degree_cap = 10;
    std::uint64_t seed = 42;  // corpus seed for the synthetic kind
};

Dataset load_dataset(const DatasetSpec& spec);

struct DetectorConfig {
    double upper_percentile = 75.0;
    int npmr = 2;  // operating point reported in the run summary
};

struct EvalSetConfig {
    int clean_validation = 50;
    int clean_train = 30;
    int backdoor_train = 30;
    bool explain_all = false;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    double train_frac = 0.6;
    double val_frac = 0.2;
    AttackConfig attack;
    ModelConfig model;
    TrainConfig train;
    ExplainerConfig explainer;
    DetectorConfig detector;
    EvalSetConfig eval_set;
    AdaptiveConfig adaptive;
    std::vector<std::uint64_t> seeds = {1};
    bool with_clean_baseline = true;

    nlohmann::json normalized;  // canonical JSON mirror, feeds the config hash
};

struct SweepConfig {
    ExperimentConfig base;
    std::vector<std::string> trigger_models = {"ER"};
    std::vector<int> trigger_sizes = {6};
};

// Reads .json directly or .toml through a small built-in subset reader
// (tables, dotted tables, strings, numbers, booleans, flat arrays).
nlohmann::json load_config_file(const std::string& path);
nlohmann::json parse_toml_subset(const std::string& text);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

// FNV-1a digest of the canonical JSON form; stable under key reordering.
std::string config_hash(const nlohmann::json& normalized);

}  // namespace graphguard
