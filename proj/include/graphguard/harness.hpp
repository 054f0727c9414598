#pragma once

#include "graphguard/config.hpp"
#include "graphguard/detector.hpp"

namespace graphguard {

struct RunReport {
    std::uint64_t seed = 0;
    std::string config_hash;
    double asr = 0.0;
    double clean_test_accuracy = 0.0;
    double baseline_clean_accuracy = -1.0;  // -1 when the clean baseline was skipped
    int poisoned_count = 0;
    int eval_clean = 0;
    int eval_backdoor = 0;
    int validation_explained = 0;
    DetectionReport detection;
    std::vector<PercentileSweepRow> percentile_rows;
    std::string metrics_csv_path;
    std::string votes_csv_path;
    std::string detection_report_path;
    std::string percentile_sweep_path;
    std::string poison_report_path;
    std::string model_path;
    double wall_clock_seconds = 0.0;
};

// One full pipeline pass: poison the train split, train the classifier,
// measure ASR and clean accuracy, explain the validation and evaluation
// sets, fit thresholds on clean validation, vote, and write the artifacts
// under out_dir. Deterministic per (config, seed); stage failures raise
// Error with the stage name, leaving partial artifacts on disk.
RunReport run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                         const std::string& out_dir);

void save_run_report_json(const std::string& path, const RunReport& report);

struct SweepCellResult {
    int config_index = 0;
    std::string trigger_model;
    int trigger_size = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    RunReport report;
};

// Executes the grid (trigger models x sizes x seeds) in a small worker pool.
// Individual failures are recorded and the sweep continues. Emits
// sweep_results.csv (one row per config/seed/NPMR), sweep_aggregate.csv
// (seed means), trigger_size_vs_f1.csv and asr_vs_f1.csv under out_root.
std::vector<SweepCellResult> run_sweep(const SweepConfig& sweep, const std::string& out_root,
                                       int jobs);

// 7 x 7 table: how often each metric is part of an exactly-k positive set.
// Reads the votes.csv files produced by run_experiment.
struct KSetPrevalence {
    std::array<std::array<double, kNumMetrics>, kNumMetrics> rate{};  // [metric][k-1]
    std::array<int, kNumMetrics> k_count{};
};

KSetPrevalence report_k_set_prevalence(const std::vector<std::string>& votes_csv_paths);
void save_k_set_prevalence_csv(const std::string& path, const KSetPrevalence& table);

}  // namespace graphguard
