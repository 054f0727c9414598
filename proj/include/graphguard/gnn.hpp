#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphguard/graph.hpp"
#include "graphguard/optim.hpp"
#include "graphguard/tensor.hpp"

namespace graphguard {

enum class GnnArch { kGCN, kGIN };
enum class Readout { kMean, kSum };

std::string to_string(GnnArch arch);
std::string to_string(Readout readout);
GnnArch arch_from_string(const std::string& s);
Readout readout_from_string(const std::string& s);

struct ModelConfig {
    GnnArch architecture = GnnArch::kGIN;
    int hidden_dim = 64;
    int num_layers = 3;  // message-passing layers, 2..4
    std::optional<Readout> readout;  // default: mean for GCN, sum for GIN
    std::uint64_t seed = 0;

    Readout effective_readout() const {
        return readout ? *readout
                       : (architecture == GnnArch::kGCN ? Readout::kMean : Readout::kSum);
    }
    void validate() const;
};

struct TrainConfig {
    int epochs = 300;
    double learning_rate = 0.01;
    OptimizerKind optimizer = OptimizerKind::kAdam;
    std::uint64_t seed = 0;

    void validate() const;
};

// Graph classifier. GCN layers apply the symmetric-normalized masked
// adjacency (with self loops); GIN layers apply (1+eps)h + masked neighbor
// sum followed by a two-layer MLP. Weights live in leaf tensors; a trained
// model is frozen (requires_grad off) and safe to share across threads.
struct GnnModel {
    GnnArch architecture = GnnArch::kGIN;
    Readout readout = Readout::kSum;
    int input_dim = 0;
    int hidden_dim = 0;
    int num_layers = 0;
    int num_classes = 0;

    std::vector<Tensor> gcn_weights;  // per layer, in x out
    struct GinLayer {
        Tensor w1, b1, w2, b2, eps;
    };
    std::vector<GinLayer> gin_layers;
    Tensor head_w, head_b;

    std::vector<Tensor> parameters() const;
    void set_trainable(bool trainable);
    GnnModel clone(bool trainable) const;
};

GnnModel init_model(const ModelConfig& config, int input_dim, int num_classes);

// Differentiable forward pass to class logits; masks (when given) must be
// non-null tensors of length |edges| / num_nodes and participate in the tape.
Tensor forward_logits(const GnnModel& model, const Graph& graph,
                      const Tensor* edge_mask = nullptr, const Tensor* node_mask = nullptr);

// Probability vector over classes (sums to 1); masks are plain weights
// in [0, 1]. Throws ShapeError on mask/feature width mismatch and
// NumericError if an activation goes non-finite.
std::vector<double> forward(const GnnModel& model, const Graph& graph,
                            const std::vector<double>* edge_mask = nullptr,
                            const std::vector<double>* node_mask = nullptr);

struct Prediction {
    int label = 0;
    std::vector<double> probs;
};

Prediction predict(const GnnModel& model, const Graph& graph);
double accuracy(const GnnModel& model, const std::vector<Graph>& graphs);

struct TrainedModel {
    GnnModel model;
    std::vector<double> loss_curve;  // mean train cross-entropy per epoch
};

// Full-batch training on the dataset's train split; deterministic per seed.
TrainedModel train_classifier(const Dataset& dataset, const ModelConfig& model_config,
                              const TrainConfig& train_config);

// As above but over an explicit list of graphs (used for surrogate retraining).
TrainedModel train_on_graphs(const std::vector<Graph>& graphs, int num_classes,
                             const ModelConfig& model_config, const TrainConfig& train_config);

// Checkpoint: architecture tag, shapes, flattened weights, training config.
void save_model_json(const std::string& path, const GnnModel& model,
                     const TrainConfig& train_config);
GnnModel load_model_json(const std::string& path);

}  // namespace graphguard
