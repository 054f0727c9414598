#include "graphguard/attack.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace graphguard {

namespace {
constexpr std::uint64_t kTriggerPlacementDomain = 0x7061636Bu;  // train-split placement
constexpr std::uint64_t kTestPlacementDomain = 0x7465737Au;     // test-copy placement
constexpr std::uint64_t kSelectionDomain = 0x73656C65u;         // poisoned-id sampling
}  // namespace

std::string to_string(AttackMode mode) {
    return mode == AttackMode::kDirtyLabel ? "dirty-label" : "clean-label";
}

AttackMode attack_mode_from_string(const std::string& s) {
    if (s == "dirty-label") return AttackMode::kDirtyLabel;
    if (s == "clean-label") return AttackMode::kCleanLabel;
    throw ConfigError("unknown attack mode: " + s);
}

void AttackConfig::validate(int num_classes) const {
    trigger.validate();
    if (poison_rate <= 0.0 || poison_rate > 1.0)
        throw ConfigError("poison_rate must lie in (0,1]");
    if (target_label < 0 || target_label >= num_classes)
        throw ConfigError("target_label out of range");
}

Graph inject_trigger(const Graph& graph, const Graph& trigger, int target_label, AttackMode mode,
                     FeatureMode feature_mode, int degree_cap, Rng& rng,
                     std::vector<int>* hosts_out) {
    if (trigger.num_nodes > graph.num_nodes)
        throw DataError("trigger (" + std::to_string(trigger.num_nodes) +
                        " nodes) larger than graph " + std::to_string(graph.id));

    const auto hosts = rng.sample_without_replacement(graph.num_nodes, trigger.num_nodes);
    if (hosts_out) *hosts_out = hosts;
    std::set<int> host_set(hosts.begin(), hosts.end());

    std::vector<std::pair<int, int>> edges;
    edges.reserve(graph.edges.size() + trigger.edges.size());
    for (const auto& [u, v] : graph.edges) {
        if (host_set.count(u) && host_set.count(v)) continue;  // replaced by trigger edges
        edges.emplace_back(u, v);
    }
    for (const auto& [u, v] : trigger.edges)
        edges.emplace_back(hosts[static_cast<std::size_t>(u)], hosts[static_cast<std::size_t>(v)]);

    Graph out = make_graph(graph.id, graph.num_nodes, std::move(edges),
                           mode == AttackMode::kDirtyLabel ? target_label : graph.label);
    out.original_label = graph.original_label;
    out.is_backdoored = true;
    if (feature_mode == FeatureMode::kDegreeOnehot) {
        apply_degree_features(out, degree_cap);
    } else {
        out.node_features = graph.node_features;
        out.feature_dim = graph.feature_dim;
    }
    return out;
}

std::pair<Dataset, PoisonReport> poison_dataset(const Dataset& dataset,
                                                const AttackConfig& config) {
    config.validate(dataset.num_classes);
    const auto train_ids = dataset.split_ids(SplitKind::kTrain);
    const int n_poison =
        static_cast<int>(std::lround(config.poison_rate * static_cast<double>(train_ids.size())));
    if (n_poison < 1)
        throw ConfigError("poison_rate " + std::to_string(config.poison_rate) +
                          " rounds to zero poisoned graphs");

    // Only graphs large enough to host the trigger are eligible.
    std::vector<int> eligible;
    for (int id : train_ids) {
        const Graph& g = dataset.by_id(id);
        if (g.num_nodes < config.trigger.size) continue;
        if (config.mode == AttackMode::kCleanLabel && g.label != config.target_label) continue;
        eligible.push_back(id);
    }
    if (static_cast<int>(eligible.size()) < n_poison) {
        throw ConfigError(std::string(config.mode == AttackMode::kCleanLabel
                                          ? "not enough target-class train graphs"
                                          : "not enough train graphs large enough") +
                          " to poison " + std::to_string(n_poison));
    }

    Rng select_rng(mix_seed(config.seed, kSelectionDomain));
    select_rng.shuffle(eligible);
    std::vector<int> poisoned(eligible.begin(), eligible.begin() + n_poison);
    std::sort(poisoned.begin(), poisoned.end());

    Rng trigger_rng(config.trigger.seed);
    const Graph trigger = gen_trigger(config.trigger, trigger_rng);

    Dataset out = dataset;
    PoisonReport report;
    report.poisoned_ids = poisoned;
    for (int id : poisoned) {
        Rng g_rng(mix_seed(mix_seed(config.seed, kTriggerPlacementDomain),
                           static_cast<std::uint64_t>(id)));
        for (std::size_t i = 0; i < out.graphs.size(); ++i) {
            if (out.graphs[i].id != id) continue;
            std::vector<int> hosts;
            out.graphs[i] =
                inject_trigger(out.graphs[i], trigger, config.target_label, config.mode,
                               out.feature_mode, out.degree_cap, g_rng, &hosts);
            report.trigger_node_map[id] = std::move(hosts);
            break;
        }
    }
    out.validate();
    return {std::move(out), std::move(report)};
}

std::vector<Graph> make_backdoored_test(const Dataset& dataset, const AttackConfig& config) {
    config.validate(dataset.num_classes);
    Rng trigger_rng(config.trigger.seed);
    const Graph trigger = gen_trigger(config.trigger, trigger_rng);
    std::vector<Graph> out;
    for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
        if (dataset.split_of[i] != SplitKind::kTest) continue;
        const Graph& g = dataset.graphs[i];
        if (g.original_label == config.target_label) continue;
        if (g.num_nodes < config.trigger.size) continue;
        Rng g_rng(mix_seed(mix_seed(config.seed, kTestPlacementDomain),
                           static_cast<std::uint64_t>(g.id)));
        out.push_back(inject_trigger(g, trigger, config.target_label, AttackMode::kCleanLabel,
                                     dataset.feature_mode, dataset.degree_cap, g_rng));
    }
    return out;
}

double attack_success_rate(const GnnModel& model, const std::vector<Graph>& backdoored_test,
                           int target_label) {
    int eligible = 0;
    int hits = 0;
    for (const auto& g : backdoored_test) {
        if (!g.is_backdoored)
            throw EvalError("attack_success_rate expects backdoored inputs only");
        if (g.original_label == target_label) continue;
        ++eligible;
        if (predict(model, g).label == target_label) ++hits;
    }
    if (eligible == 0)
        throw EvalError("attack_success_rate: no eligible graphs (original label != target)");
    return static_cast<double>(hits) / static_cast<double>(eligible);
}

std::string poison_report_to_json(const PoisonReport& report) {
    nlohmann::json j;
    j["poisoned_ids"] = report.poisoned_ids;
    nlohmann::json node_map;
    for (const auto& [id, hosts] : report.trigger_node_map)
        node_map[std::to_string(id)] = hosts;
    j["trigger_node_map"] = std::move(node_map);
    if (report.asr) j["asr"] = *report.asr;
    return j.dump(2);
}

}  // namespace graphguard
