#pragma once

#include <string>
#include <utility>
#include <vector>

#include "graphguard/common.hpp"

namespace graphguard {

enum class FeatureMode { kDegreeOnehot, kNodeLabelOnehot };
enum class SplitKind { kTrain, kValidation, kTest };

std::string to_string(FeatureMode mode);
std::string to_string(SplitKind split);
FeatureMode feature_mode_from_string(const std::string& s);
SplitKind split_from_string(const std::string& s);

// Undirected simple graph with a node feature matrix. Edges are stored once
// with u < v, sorted, no duplicates, no self-loops. Immutable by convention
// once built; mutation paths go through the free functions below which
// re-establish the invariants.
struct Graph {
    int id = 0;
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<double> node_features;  // row-major num_nodes x feature_dim
    int feature_dim = 0;
    int label = 0;
    int original_label = 0;  // label before any poisoning; equals label on clean graphs
    bool is_backdoored = false;

    int num_edges() const { return static_cast<int>(edges.size()); }
    double feature(int node, int j) const {
        return node_features[static_cast<std::size_t>(node) * feature_dim + j];
    }
    bool has_edge(int u, int v) const;
    std::vector<int> degrees() const;

    // Checks the structural invariants; throws DataError on violation.
    void validate() const;
};

// Normalizes an edge list (orient u < v, sort, dedup, drop self-loops) and
// builds a graph. Features are left empty; callers attach them afterwards.
Graph make_graph(int id, int num_nodes, std::vector<std::pair<int, int>> edges, int label);

// One-hot degree features: row i has a 1 at index min(degree(i), cap),
// so the matrix is num_nodes x (cap + 1).
std::vector<double> degree_features(const Graph& g, int cap);

// Installs degree-onehot features on the graph in place.
void apply_degree_features(Graph& g, int cap);

struct Dataset {
    std::string name;
    int num_classes = 0;
    FeatureMode feature_mode = FeatureMode::kDegreeOnehot;
    int degree_cap = 10;
    std::vector<Graph> graphs;
    std::vector<SplitKind> split_of;  // aligned with graphs by index

    int size() const { return static_cast<int>(graphs.size()); }
    int feature_dim() const { return graphs.empty() ? 0 : graphs.front().feature_dim; }

    const Graph& by_id(int id) const;
    std::vector<int> split_ids(SplitKind s) const;

    // Splits must partition ids; the validation split must be clean.
    void validate() const;
};

}  // namespace graphguard
