#include "graphguard/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace graphguard {

std::string to_string(GnnArch arch) { return arch == GnnArch::kGCN ? "GCN" : "GIN"; }
std::string to_string(Readout readout) { return readout == Readout::kMean ? "mean" : "sum"; }

GnnArch arch_from_string(const std::string& s) {
    if (s == "GCN" || s == "gcn") return GnnArch::kGCN;
    if (s == "GIN" || s == "gin") return GnnArch::kGIN;
    throw ConfigError("unknown architecture: " + s);
}

Readout readout_from_string(const std::string& s) {
    if (s == "mean") return Readout::kMean;
    if (s == "sum") return Readout::kSum;
    throw ConfigError("unknown readout: " + s);
}

void ModelConfig::validate() const {
    if (hidden_dim < 1) throw ConfigError("hidden_dim must be positive");
    if (num_layers < 2 || num_layers > 4) throw ConfigError("num_layers must lie in [2,4]");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
}

namespace {

Tensor glorot(int rows, int cols, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    for (auto& x : w) x = rng.uniform(-a, a);
    return Tensor::leaf(rows, cols, std::move(w), true);
}

}  // namespace

std::vector<Tensor> GnnModel::parameters() const {
    std::vector<Tensor> params;
    for (const auto& w : gcn_weights) params.push_back(w);
    for (const auto& l : gin_layers) {
        params.push_back(l.w1);
        params.push_back(l.b1);
        params.push_back(l.w2);
        params.push_back(l.b2);
        params.push_back(l.eps);
    }
    params.push_back(head_w);
    params.push_back(head_b);
    return params;
}

void GnnModel::set_trainable(bool trainable) {
    for (auto& p : parameters()) p.set_requires_grad(trainable);
}

GnnModel GnnModel::clone(bool trainable) const {
    GnnModel out = *this;
    auto copy = [trainable](const Tensor& t) {
        return Tensor::leaf(t.rows(), t.cols(), t.values(), trainable);
    };
    out.gcn_weights.clear();
    for (const auto& w : gcn_weights) out.gcn_weights.push_back(copy(w));
    out.gin_layers.clear();
    for (const auto& l : gin_layers)
        out.gin_layers.push_back({copy(l.w1), copy(l.b1), copy(l.w2), copy(l.b2), copy(l.eps)});
    out.head_w = copy(head_w);
    out.head_b = copy(head_b);
    return out;
}

GnnModel init_model(const ModelConfig& config, int input_dim, int num_classes) {
    config.validate();
    if (input_dim < 1) throw ConfigError("model input width must be positive");
    if (num_classes < 2) throw ConfigError("need at least two classes");
    Rng rng(mix_seed(config.seed, 0x6E6Eu));
    GnnModel m;
    m.architecture = config.architecture;
    m.readout = config.effective_readout();
    m.input_dim = input_dim;
    m.hidden_dim = config.hidden_dim;
    m.num_layers = config.num_layers;
    m.num_classes = num_classes;
    for (int l = 0; l < config.num_layers; ++l) {
        const int in = l == 0 ? input_dim : config.hidden_dim;
        const int out = config.hidden_dim;
        if (config.architecture == GnnArch::kGCN) {
            m.gcn_weights.push_back(glorot(in, out, rng));
        } else {
            GnnModel::GinLayer layer;
            layer.w1 = glorot(in, out, rng);
            layer.b1 = Tensor::zeros(1, out, true);
            layer.w2 = glorot(out, out, rng);
            layer.b2 = Tensor::zeros(1, out, true);
            layer.eps = Tensor::scalar(0.0, true);
            m.gin_layers.push_back(std::move(layer));
        }
    }
    m.head_w = glorot(config.hidden_dim, num_classes, rng);
    m.head_b = Tensor::zeros(1, num_classes, true);
    return m;
}

Tensor forward_logits(const GnnModel& model, const Graph& graph, const Tensor* edge_mask,
                      const Tensor* node_mask) {
    if (graph.num_nodes == 0) throw ShapeError("forward: graph has no nodes");
    if (graph.feature_dim != model.input_dim)
        throw ShapeError("forward: feature width " + std::to_string(graph.feature_dim) +
                         " does not match model input " + std::to_string(model.input_dim));
    if (edge_mask && static_cast<int>(edge_mask->size()) != graph.num_edges())
        throw ShapeError("forward: edge mask length mismatch");
    if (node_mask && static_cast<int>(node_mask->size()) != graph.num_nodes)
        throw ShapeError("forward: node mask length mismatch");

    const int n = graph.num_nodes;
    Tensor h = Tensor::leaf(n, graph.feature_dim, graph.node_features, false);
    if (node_mask) h = mul_colvec(h, *node_mask);

    Tensor ones_mask;
    const Tensor* mask = edge_mask;
    if (!mask) {
        ones_mask = Tensor::leaf(static_cast<int>(graph.edges.size()), 1,
                                 std::vector<double>(graph.edges.size(), 1.0), false);
        mask = &ones_mask;
    }

    if (model.architecture == GnnArch::kGCN) {
        Tensor a_hat = scatter_edges(*mask, graph.edges, n, 1.0);
        Tensor dinv = pow_const(row_sum(a_hat), -0.5);
        Tensor a_norm = outer_scale(a_hat, dinv);
        for (const auto& w : model.gcn_weights) h = relu(matmul(a_norm, matmul(h, w)));
    } else {
        Tensor a_m = scatter_edges(*mask, graph.edges, n, 0.0);
        for (int l = 0; l < model.num_layers; ++l) {
            const auto& layer = model.gin_layers[static_cast<std::size_t>(l)];
            Tensor agg = add(scalar_mul(add_const(layer.eps, 1.0), h), matmul(a_m, h));
            Tensor hidden = relu(add_rowvec(matmul(agg, layer.w1), layer.b1));
            h = add_rowvec(matmul(hidden, layer.w2), layer.b2);
            if (l + 1 < model.num_layers) h = relu(h);
        }
    }

    Tensor pooled = model.readout == Readout::kMean ? col_mean(h) : col_sum(h);
    Tensor logits = add(matmul(pooled, model.head_w), model.head_b);
    for (double v : logits.values()) {
        if (!std::isfinite(v))
            throw NumericError("forward: non-finite logit on graph " + std::to_string(graph.id));
    }
    return logits;
}

std::vector<double> forward(const GnnModel& model, const Graph& graph,
                            const std::vector<double>* edge_mask,
                            const std::vector<double>* node_mask) {
    auto finite = [](const std::vector<double>& v) {
        for (double x : v) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    };
    std::optional<Tensor> em, nm;
    if (edge_mask) {
        if (!finite(*edge_mask)) throw NumericError("forward: non-finite edge mask");
        em = Tensor::leaf(static_cast<int>(edge_mask->size()), 1, *edge_mask, false);
    }
    if (node_mask) {
        if (!finite(*node_mask)) throw NumericError("forward: non-finite node mask");
        nm = Tensor::leaf(static_cast<int>(node_mask->size()), 1, *node_mask, false);
    }
    Tensor logits = forward_logits(model, graph, em ? &*em : nullptr, nm ? &*nm : nullptr);
    return softmax(logits.values());
}

Prediction predict(const GnnModel& model, const Graph& graph) {
    Prediction p;
    p.probs = forward(model, graph);
    p.label = 0;
    for (std::size_t c = 1; c < p.probs.size(); ++c) {
        if (p.probs[c] > p.probs[static_cast<std::size_t>(p.label)]) p.label = static_cast<int>(c);
    }
    return p;
}

double accuracy(const GnnModel& model, const std::vector<Graph>& graphs) {
    if (graphs.empty()) throw EvalError("accuracy over an empty graph set");
    int correct = 0;
    for (const auto& g : graphs) {
        if (predict(model, g).label == g.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(graphs.size());
}

TrainedModel train_on_graphs(const std::vector<Graph>& graphs, int num_classes,
                             const ModelConfig& model_config, const TrainConfig& train_config) {
    model_config.validate();
    train_config.validate();
    if (graphs.empty()) throw TrainError("training requires a nonempty train split");
    std::set<int> labels;
    for (const auto& g : graphs) labels.insert(g.label);
    if (labels.size() < 2) throw TrainError("training requires at least two classes present");

    GnnModel model = init_model(model_config, graphs.front().feature_dim, num_classes);
    Optimizer opt(model.parameters(), train_config.optimizer, train_config.learning_rate);
    const double inv_n = 1.0 / static_cast<double>(graphs.size());

    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(train_config.epochs));
    for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (const auto& g : graphs) {
            Tensor loss = softmax_cross_entropy(forward_logits(model, g), g.label);
            epoch_loss += loss.item() * inv_n;
            backward(mul_const(loss, inv_n));
        }
        if (!std::isfinite(epoch_loss))
            throw TrainError("training diverged at epoch " + std::to_string(epoch));
        curve.push_back(epoch_loss);
        opt.step();
    }
    model.set_trainable(false);
    return {std::move(model), std::move(curve)};
}

TrainedModel train_classifier(const Dataset& dataset, const ModelConfig& model_config,
                              const TrainConfig& train_config) {
    std::vector<Graph> train;
    for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
        if (dataset.split_of[i] == SplitKind::kTrain) train.push_back(dataset.graphs[i]);
    }
    return train_on_graphs(train, dataset.num_classes, model_config, train_config);
}

namespace {

nlohmann::json tensor_to_json(const Tensor& t) {
    return nlohmann::json{{"rows", t.rows()}, {"cols", t.cols()}, {"values", t.values()}};
}

Tensor tensor_from_json(const nlohmann::json& j) {
    return Tensor::leaf(j.at("rows").get<int>(), j.at("cols").get<int>(),
                        j.at("values").get<std::vector<double>>(), false);
}

}  // namespace

void save_model_json(const std::string& path, const GnnModel& model,
                     const TrainConfig& train_config) {
    nlohmann::json j;
    j["architecture"] = to_string(model.architecture);
    j["readout"] = to_string(model.readout);
    j["input_dim"] = model.input_dim;
    j["hidden_dim"] = model.hidden_dim;
    j["num_layers"] = model.num_layers;
    j["num_classes"] = model.num_classes;
    nlohmann::json layers = nlohmann::json::array();
    if (model.architecture == GnnArch::kGCN) {
        for (const auto& w : model.gcn_weights) layers.push_back(tensor_to_json(w));
    } else {
        for (const auto& l : model.gin_layers) {
            layers.push_back(nlohmann::json{{"w1", tensor_to_json(l.w1)},
                                            {"b1", tensor_to_json(l.b1)},
                                            {"w2", tensor_to_json(l.w2)},
                                            {"b2", tensor_to_json(l.b2)},
                                            {"eps", l.eps.values()[0]}});
        }
    }
    j["layers"] = std::move(layers);
    j["head_w"] = tensor_to_json(model.head_w);
    j["head_b"] = tensor_to_json(model.head_b);
    j["train_config"] = {{"epochs", train_config.epochs},
                         {"learning_rate", train_config.learning_rate},
                         {"optimizer", to_string(train_config.optimizer)},
                         {"seed", train_config.seed}};
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << "\n";
}

GnnModel load_model_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path);
    nlohmann::json j;
    in >> j;
    GnnModel m;
    m.architecture = arch_from_string(j.at("architecture").get<std::string>());
    m.readout = readout_from_string(j.at("readout").get<std::string>());
    m.input_dim = j.at("input_dim").get<int>();
    m.hidden_dim = j.at("hidden_dim").get<int>();
    m.num_layers = j.at("num_layers").get<int>();
    m.num_classes = j.at("num_classes").get<int>();
    for (const auto& layer : j.at("layers")) {
        if (m.architecture == GnnArch::kGCN) {
            m.gcn_weights.push_back(tensor_from_json(layer));
        } else {
            GnnModel::GinLayer l;
            l.w1 = tensor_from_json(layer.at("w1"));
            l.b1 = tensor_from_json(layer.at("b1"));
            l.w2 = tensor_from_json(layer.at("w2"));
            l.b2 = tensor_from_json(layer.at("b2"));
            l.eps = Tensor::scalar(layer.at("eps").get<double>(), false);
            m.gin_layers.push_back(std::move(l));
        }
    }
    m.head_w = tensor_from_json(j.at("head_w"));
    m.head_b = tensor_from_json(j.at("head_b"));
    return m;
}

}  // namespace graphguard
