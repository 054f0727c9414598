#pragma once

#include "graphguard/gnn.hpp"
#include "graphguard/graph.hpp"

namespace graphguard {

struct ExplainerConfig {
    int epochs = 100;              // mask optimization steps T
    double learning_rate = 0.01;   // Adam step size on the mask logits
    double coeff_edge_entropy = 1.0;
    double coeff_node_entropy = 1.0;
    double coeff_edge_size = 1e-4;
    double coeff_node_size = 1e-4;
    double subgraph_threshold = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

// Output of one mask optimization: soft masks, the loss trace (initial value
// plus one entry per step), the binarized subgraph, and the probability
// vectors of the full graph, the kept subgraph, and its complement.
struct Explanation {
    int graph_id = 0;
    int explained_label = 0;
    std::vector<double> edge_mask;   // per edge, in (0,1)
    std::vector<double> node_mask;   // per node, in (0,1)
    std::vector<double> loss_curve;  // epochs + 1 values
    std::vector<double> p_full, p_sub, p_comp;
    std::vector<int> subgraph_nodes;
    std::vector<std::pair<int, int>> subgraph_edges;
    bool degenerate = false;  // zero edges or empty kept subgraph
};

// Optimizes edge and node masks against the graph's stored (ground-truth)
// label: cross-entropy of the masked forward plus size (mean mask value)
// and element-entropy regularizers. Mask logits start from a seeded
// Gaussian and pass through the logistic, so masks stay strictly in (0,1).
Explanation explain(const GnnModel& model, const Graph& graph, const ExplainerConfig& config);

// Binarization rule shared with the metrics: nodes above threshold, then
// edges above threshold whose endpoints both survived.
std::pair<std::vector<int>, std::vector<std::pair<int, int>>> extract_subgraph(
    const Graph& graph, const std::vector<double>& edge_mask,
    const std::vector<double>& node_mask, double threshold);

std::string explanation_to_json(const Explanation& e);
Explanation explanation_from_json(const std::string& text);
void save_explanation_json(const std::string& path, const Explanation& e);
Explanation load_explanation_json(const std::string& path);

}  // namespace graphguard
