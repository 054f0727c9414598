#include "graphguard/graph.hpp"

#include <algorithm>

namespace graphguard {

std::string to_string(FeatureMode mode) {
    return mode == FeatureMode::kDegreeOnehot ? "degree-onehot" : "node-label-onehot";
}

std::string to_string(SplitKind split) {
    switch (split) {
        case SplitKind::kTrain: return "train";
        case SplitKind::kValidation: return "validation";
        case SplitKind::kTest: return "test";
    }
    return "train";
}

FeatureMode feature_mode_from_string(const std::string& s) {
    if (s == "degree-onehot") return FeatureMode::kDegreeOnehot;
    if (s == "node-label-onehot") return FeatureMode::kNodeLabelOnehot;
    throw ConfigError("unknown feature mode: " + s);
}

SplitKind split_from_string(const std::string& s) {
    if (s == "train") return SplitKind::kTrain;
    if (s == "validation") return SplitKind::kValidation;
    if (s == "test") return SplitKind::kTest;
    throw ConfigError("unknown split: " + s);
}

bool Graph::has_edge(int u, int v) const {
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(num_nodes), 0);
    for (const auto& [u, v] : edges) {
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
    }
    return deg;
}

void Graph::validate() const {
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
            throw DataError("graph " + std::to_string(id) + ": edge endpoint out of range");
        if (u >= v)
            throw DataError("graph " + std::to_string(id) + ": edge not stored as u < v");
    }
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw DataError("graph " + std::to_string(id) + ": duplicate edge");
    if (!std::is_sorted(edges.begin(), edges.end()))
        throw DataError("graph " + std::to_string(id) + ": edges not sorted");
    if (feature_dim > 0 &&
        node_features.size() != static_cast<std::size_t>(num_nodes) * feature_dim)
        throw DataError("graph " + std::to_string(id) + ": feature matrix shape mismatch");
}

Graph make_graph(int id, int num_nodes, std::vector<std::pair<int, int>> edges, int label) {
    for (auto& [u, v] : edges) {
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::erase_if(edges, [](const std::pair<int, int>& e) { return e.first == e.second; });
    Graph g;
    g.id = id;
    g.num_nodes = num_nodes;
    g.edges = std::move(edges);
    g.label = label;
    g.original_label = label;
    g.validate();
    return g;
}

std::vector<double> degree_features(const Graph& g, int cap) {
    if (cap < 1) throw ConfigError("degree feature cap must be >= 1");
    const int dim = cap + 1;
    std::vector<double> feat(static_cast<std::size_t>(g.num_nodes) * dim, 0.0);
    const auto deg = g.degrees();
    for (int i = 0; i < g.num_nodes; ++i) {
        int bucket = std::min(deg[static_cast<std::size_t>(i)], cap);
        feat[static_cast<std::size_t>(i) * dim + bucket] = 1.0;
    }
    return feat;
}

void apply_degree_features(Graph& g, int cap) {
    g.node_features = degree_features(g, cap);
    g.feature_dim = cap + 1;
}

const Graph& Dataset::by_id(int id) const {
    if (id >= 0 && id < size() && graphs[static_cast<std::size_t>(id)].id == id)
        return graphs[static_cast<std::size_t>(id)];
    for (const auto& g : graphs) {
        if (g.id == id) return g;
    }
    throw DataError("no graph with id " + std::to_string(id));
}

std::vector<int> Dataset::split_ids(SplitKind s) const {
    std::vector<int> ids;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (split_of[i] == s) ids.push_back(graphs[i].id);
    }
    return ids;
}

void Dataset::validate() const {
    if (split_of.size() != graphs.size())
        throw DataError("split assignment does not cover every graph");
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        graphs[i].validate();
        if (graphs[i].label < 0 || graphs[i].label >= num_classes)
            throw DataError("graph " + std::to_string(graphs[i].id) + ": label out of range");
        if (split_of[i] == SplitKind::kValidation && graphs[i].is_backdoored)
            throw DataError("validation split must contain only clean graphs");
    }
    if (!graphs.empty()) {
        const int dim = graphs.front().feature_dim;
        for (const auto& g : graphs) {
            if (g.feature_dim != dim)
                throw DataError("feature width differs across graphs");
        }
    }
}

}  // namespace graphguard
