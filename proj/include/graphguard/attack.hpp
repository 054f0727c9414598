#pragma once

#include <map>
#include <optional>

#include "graphguard/gnn.hpp"
#include "graphguard/graph.hpp"
#include "graphguard/random_graphs.hpp"

namespace graphguard {

enum class AttackMode { kDirtyLabel, kCleanLabel };

std::string to_string(AttackMode mode);
AttackMode attack_mode_from_string(const std::string& s);

struct AttackConfig {
    TriggerSpec trigger;
    double poison_rate = 0.2;
    int target_label = 1;
    AttackMode mode = AttackMode::kDirtyLabel;
    std::uint64_t seed = 0;

    void validate(int num_classes) const;
};

struct PoisonReport {
    std::vector<int> poisoned_ids;
    std::map<int, std::vector<int>> trigger_node_map;  // poisoned graph id -> host nodes
    std::optional<double> asr;
};

// Installs the trigger on `size` uniformly sampled host nodes: existing edges
// among the hosts are removed, the trigger edges go in under the host map,
// and degree features are recomputed (node-label features are preserved).
// Dirty-label rewrites the label to the target; clean-label leaves it.
Graph inject_trigger(const Graph& graph, const Graph& trigger, int target_label, AttackMode mode,
                     FeatureMode feature_mode, int degree_cap, Rng& rng,
                     std::vector<int>* hosts_out = nullptr);

// Poisons round(poison_rate * |train|) train graphs. Dirty-label samples
// uniformly from the train split, clean-label only from target-class graphs.
// Validation and test splits are untouched. The trigger structure is drawn
// once from TriggerSpec::seed; host placement uses a per-graph stream split
// from the attack seed.
std::pair<Dataset, PoisonReport> poison_dataset(const Dataset& dataset, const AttackConfig& config);

// Backdoored copies of every test graph whose original label differs from
// the target (graphs too small to host the trigger are skipped).
std::vector<Graph> make_backdoored_test(const Dataset& dataset, const AttackConfig& config);

// Fraction of backdoored inputs predicted as the target label, over inputs
// whose original label differs from the target.
double attack_success_rate(const GnnModel& model, const std::vector<Graph>& backdoored_test,
                           int target_label);

std::string poison_report_to_json(const PoisonReport& report);

}  // namespace graphguard
