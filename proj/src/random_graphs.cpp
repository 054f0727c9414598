#include "graphguard/random_graphs.hpp"

#include <algorithm>
#include <set>

namespace graphguard {

std::string to_string(TriggerModel model) {
    switch (model) {
        case TriggerModel::kER: return "ER";
        case TriggerModel::kSW: return "SW";
        case TriggerModel::kPA: return "PA";
        case TriggerModel::kAdaptive: return "ADAPTIVE";
    }
    return "ER";
}

TriggerModel trigger_model_from_string(const std::string& s) {
    if (s == "ER" || s == "er") return TriggerModel::kER;
    if (s == "SW" || s == "sw") return TriggerModel::kSW;
    if (s == "PA" || s == "pa") return TriggerModel::kPA;
    if (s == "ADAPTIVE" || s == "adaptive") return TriggerModel::kAdaptive;
    throw ConfigError("unknown trigger model: " + s);
}

void TriggerSpec::validate() const {
    if (size < 2) throw ConfigError("trigger size must be >= 2");
    if (er_p < 0.0 || er_p > 1.0) throw ConfigError("er_p must lie in [0,1]");
    if (sw_beta < 0.0 || sw_beta > 1.0) throw ConfigError("sw_beta must lie in [0,1]");
    if (model == TriggerModel::kSW && (sw_k % 2 != 0 || sw_k >= size))
        throw ConfigError("sw_k must be even and smaller than the trigger size");
    if (model == TriggerModel::kPA && (pa_m < 1 || pa_m >= size))
        throw ConfigError("pa_m must satisfy 1 <= pa_m < size");
}

namespace {

Graph gen_er(int s, double p, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < s; ++u) {
        for (int v = u + 1; v < s; ++v) {
            if (rng.bernoulli(p)) edges.emplace_back(u, v);
        }
    }
    return make_graph(-1, s, std::move(edges), 0);
}

Graph gen_sw(int s, int k, double beta, Rng& rng) {
    // Ring lattice, then rewire each lattice edge (u, u+j) with prob beta by
    // replacing its far endpoint with a uniform non-neighbor.
    std::set<std::pair<int, int>> edge_set;
    auto key = [](int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); };
    for (int j = 1; j <= k / 2; ++j) {
        for (int u = 0; u < s; ++u) edge_set.insert(key(u, (u + j) % s));
    }
    for (int j = 1; j <= k / 2; ++j) {
        for (int u = 0; u < s; ++u) {
            auto old_edge = key(u, (u + j) % s);
            if (!edge_set.count(old_edge)) continue;  // already rewired away
            if (!rng.bernoulli(beta)) continue;
            // A node of degree s-1 has no free slot left.
            std::vector<int> candidates;
            for (int w = 0; w < s; ++w) {
                if (w != u && !edge_set.count(key(u, w))) candidates.push_back(w);
            }
            if (candidates.empty()) continue;
            int w = candidates[static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(candidates.size())))];
            edge_set.erase(old_edge);
            edge_set.insert(key(u, w));
        }
    }
    std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
    return make_graph(-1, s, std::move(edges), 0);
}

Graph gen_pa(int s, int m, Rng& rng) {
    // Clique seed on m nodes, then each new node attaches m edges sampled
    // proportionally to current degree (without replacement).
    std::vector<std::pair<int, int>> edges;
    std::vector<int> degree(static_cast<std::size_t>(s), 0);
    auto add_edge = [&](int u, int v) {
        edges.emplace_back(u, v);
        ++degree[static_cast<std::size_t>(u)];
        ++degree[static_cast<std::size_t>(v)];
    };
    for (int u = 0; u < m; ++u) {
        for (int v = u + 1; v < m; ++v) add_edge(u, v);
    }
    for (int node = m; node < s; ++node) {
        std::set<int> targets;
        // m == 1 with a single seed node of degree 0: fall back to uniform.
        while (static_cast<int>(targets.size()) < m) {
            long total = 0;
            for (int v = 0; v < node; ++v) {
                if (!targets.count(v)) total += degree[static_cast<std::size_t>(v)];
            }
            int pick = -1;
            if (total == 0) {
                std::vector<int> rest;
                for (int v = 0; v < node; ++v) {
                    if (!targets.count(v)) rest.push_back(v);
                }
                pick = rest[static_cast<std::size_t>(
                    rng.uniform_int(static_cast<std::int64_t>(rest.size())))];
            } else {
                long ticket = rng.uniform_int(total);
                for (int v = 0; v < node; ++v) {
                    if (targets.count(v)) continue;
                    ticket -= degree[static_cast<std::size_t>(v)];
                    if (ticket < 0) {
                        pick = v;
                        break;
                    }
                }
            }
            targets.insert(pick);
        }
        for (int v : targets) add_edge(v, node);
    }
    return make_graph(-1, s, std::move(edges), 0);
}

}  // namespace

Graph gen_trigger(const TriggerSpec& spec, Rng& rng) {
    spec.validate();
    switch (spec.model) {
        case TriggerModel::kER: return gen_er(spec.size, spec.er_p, rng);
        case TriggerModel::kSW: return gen_sw(spec.size, spec.sw_k, spec.sw_beta, rng);
        case TriggerModel::kPA: return gen_pa(spec.size, spec.pa_m, rng);
        case TriggerModel::kAdaptive:
            throw ConfigError("adaptive triggers are produced by the trained edge generator");
    }
    throw ConfigError("unknown trigger model");
}

}  // namespace graphguard
