#include "graphguard/explainer.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "graphguard/optim.hpp"

namespace graphguard {

void ExplainerConfig::validate() const {
    if (epochs < 1) throw ConfigError("explainer epochs must be >= 1");
    if (learning_rate < 0.0) throw ConfigError("explainer learning rate must be >= 0");
    if (coeff_edge_entropy < 0.0 || coeff_node_entropy < 0.0 || coeff_edge_size < 0.0 ||
        coeff_node_size < 0.0)
        throw ConfigError("explainer coefficients must be >= 0");
    if (subgraph_threshold <= 0.0 || subgraph_threshold >= 1.0)
        throw ConfigError("subgraph_threshold must lie in (0,1)");
}

namespace {

// Mean elementwise binary entropy of a mask tensor.
Tensor mean_binary_entropy(const Tensor& m) {
    constexpr double kEps = 1e-12;
    Tensor one_minus = add_const(mul_const(m, -1.0), 1.0);
    Tensor ent = mul_const(add(mul(m, log_elem(add_const(m, kEps))),
                               mul(one_minus, log_elem(add_const(one_minus, kEps)))),
                           -1.0);
    return mean_all(ent);
}

}  // namespace

Explanation explain(const GnnModel& model, const Graph& graph, const ExplainerConfig& config) {
    config.validate();
    if (graph.num_nodes == 0) throw ShapeError("explain: graph has no nodes");

    // Work against a frozen view so backward never touches model weights.
    const GnnModel frozen = model.head_w.requires_grad() ? model.clone(false) : model;

    Rng rng(mix_seed(config.seed, 0xE59Au));
    const int n = graph.num_nodes;
    const int e = graph.num_edges();

    std::vector<double> node_init(static_cast<std::size_t>(n));
    for (auto& x : node_init) x = rng.normal(0.0, 0.1);
    std::vector<double> edge_init(static_cast<std::size_t>(e));
    for (auto& x : edge_init) x = rng.normal(0.0, 0.1);

    Tensor node_logits = Tensor::leaf(n, 1, std::move(node_init), true);
    Tensor edge_logits =
        e > 0 ? Tensor::leaf(e, 1, std::move(edge_init), true) : Tensor();

    std::vector<Tensor> params = {node_logits};
    if (e > 0) params.push_back(edge_logits);
    Optimizer opt(params, OptimizerKind::kAdam, config.learning_rate);

    auto objective = [&]() {
        Tensor node_mask = sigmoid(node_logits);
        Tensor loss;
        if (e > 0) {
            Tensor edge_mask = sigmoid(edge_logits);
            loss = softmax_cross_entropy(
                forward_logits(frozen, graph, &edge_mask, &node_mask), graph.label);
            if (config.coeff_edge_size > 0.0)
                loss = add(loss, mul_const(mean_all(edge_mask), config.coeff_edge_size));
            if (config.coeff_edge_entropy > 0.0)
                loss = add(loss,
                           mul_const(mean_binary_entropy(edge_mask), config.coeff_edge_entropy));
        } else {
            loss = softmax_cross_entropy(forward_logits(frozen, graph, nullptr, &node_mask),
                                         graph.label);
        }
        if (config.coeff_node_size > 0.0)
            loss = add(loss, mul_const(mean_all(node_mask), config.coeff_node_size));
        if (config.coeff_node_entropy > 0.0)
            loss = add(loss, mul_const(mean_binary_entropy(node_mask), config.coeff_node_entropy));
        return loss;
    };

    Explanation out;
    out.graph_id = graph.id;
    out.explained_label = graph.label;
    out.loss_curve.reserve(static_cast<std::size_t>(config.epochs) + 1);
    for (int t = 0; t < config.epochs; ++t) {
        Tensor loss = objective();
        if (!std::isfinite(loss.item()))
            throw NumericError("explainer loss became non-finite at step " + std::to_string(t) +
                               " on graph " + std::to_string(graph.id));
        out.loss_curve.push_back(loss.item());
        backward(loss);
        opt.step();
    }
    {
        Tensor final_loss = objective();
        if (!std::isfinite(final_loss.item()))
            throw NumericError("explainer final loss became non-finite on graph " +
                               std::to_string(graph.id));
        out.loss_curve.push_back(final_loss.item());
    }

    auto logistic = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    out.node_mask.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.node_mask[static_cast<std::size_t>(i)] =
        logistic(node_logits.values()[static_cast<std::size_t>(i)]);
    out.edge_mask.resize(static_cast<std::size_t>(e));
    for (int i = 0; i < e; ++i) out.edge_mask[static_cast<std::size_t>(i)] =
        logistic(edge_logits.values()[static_cast<std::size_t>(i)]);

    std::tie(out.subgraph_nodes, out.subgraph_edges) =
        extract_subgraph(graph, out.edge_mask, out.node_mask, config.subgraph_threshold);
    out.degenerate = e == 0 || out.subgraph_edges.empty();

    // Hard 0/1 masks for the kept subgraph and its complement.
    std::set<int> kept_nodes(out.subgraph_nodes.begin(), out.subgraph_nodes.end());
    std::set<std::pair<int, int>> kept_edges(out.subgraph_edges.begin(), out.subgraph_edges.end());
    std::vector<double> sub_node(static_cast<std::size_t>(n)), comp_node(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const bool in = kept_nodes.count(i) > 0;
        sub_node[static_cast<std::size_t>(i)] = in ? 1.0 : 0.0;
        comp_node[static_cast<std::size_t>(i)] = in ? 0.0 : 1.0;
    }
    std::vector<double> sub_edge(static_cast<std::size_t>(e)), comp_edge(static_cast<std::size_t>(e));
    for (int i = 0; i < e; ++i) {
        const bool in = kept_edges.count(graph.edges[static_cast<std::size_t>(i)]) > 0;
        sub_edge[static_cast<std::size_t>(i)] = in ? 1.0 : 0.0;
        comp_edge[static_cast<std::size_t>(i)] = in ? 0.0 : 1.0;
    }
    out.p_full = forward(frozen, graph);
    out.p_sub = forward(frozen, graph, e > 0 ? &sub_edge : nullptr, &sub_node);
    out.p_comp = forward(frozen, graph, e > 0 ? &comp_edge : nullptr, &comp_node);
    return out;
}

std::pair<std::vector<int>, std::vector<std::pair<int, int>>> extract_subgraph(
    const Graph& graph, const std::vector<double>& edge_mask,
    const std::vector<double>& node_mask, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw ConfigError("subgraph threshold must lie in (0,1)");
    if (static_cast<int>(node_mask.size()) != graph.num_nodes ||
        static_cast<int>(edge_mask.size()) != graph.num_edges())
        throw ShapeError("extract_subgraph: mask lengths do not match the graph");

    std::vector<int> nodes;
    std::vector<bool> kept(static_cast<std::size_t>(graph.num_nodes), false);
    for (int v = 0; v < graph.num_nodes; ++v) {
        if (node_mask[static_cast<std::size_t>(v)] > threshold) {
            nodes.push_back(v);
            kept[static_cast<std::size_t>(v)] = true;
        }
    }
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        const auto& [u, v] = graph.edges[i];
        if (edge_mask[i] > threshold && kept[static_cast<std::size_t>(u)] &&
            kept[static_cast<std::size_t>(v)])
            edges.push_back(graph.edges[i]);
    }
    return {std::move(nodes), std::move(edges)};
}

std::string explanation_to_json(const Explanation& e) {
    nlohmann::json j;
    j["graph_id"] = e.graph_id;
    j["explained_label"] = e.explained_label;
    j["edge_mask"] = e.edge_mask;
    j["node_mask"] = e.node_mask;
    j["loss_curve"] = e.loss_curve;
    j["p_full"] = e.p_full;
    j["p_sub"] = e.p_sub;
    j["p_comp"] = e.p_comp;
    j["subgraph_nodes"] = e.subgraph_nodes;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [u, v] : e.subgraph_edges) edges.push_back({u, v});
    j["subgraph_edges"] = std::move(edges);
    j["degenerate"] = e.degenerate;
    return j.dump(2);
}

Explanation explanation_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Explanation e;
    e.graph_id = j.at("graph_id").get<int>();
    e.explained_label = j.at("explained_label").get<int>();
    e.edge_mask = j.at("edge_mask").get<std::vector<double>>();
    e.node_mask = j.at("node_mask").get<std::vector<double>>();
    e.loss_curve = j.at("loss_curve").get<std::vector<double>>();
    e.p_full = j.at("p_full").get<std::vector<double>>();
    e.p_sub = j.at("p_sub").get<std::vector<double>>();
    e.p_comp = j.at("p_comp").get<std::vector<double>>();
    e.subgraph_nodes = j.at("subgraph_nodes").get<std::vector<int>>();
    for (const auto& edge : j.at("subgraph_edges"))
        e.subgraph_edges.emplace_back(edge.at(0).get<int>(), edge.at(1).get<int>());
    e.degenerate = j.at("degenerate").get<bool>();
    return e;
}

void save_explanation_json(const std::string& path, const Explanation& e) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << explanation_to_json(e) << "\n";
}

Explanation load_explanation_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return explanation_from_json(ss.str());
}

}  // namespace graphguard
