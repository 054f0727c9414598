#pragma once

#include <optional>

#include "graphguard/attack.hpp"
#include "graphguard/gnn.hpp"
#include "graphguard/graph.hpp"

namespace graphguard {

struct AdaptiveConfig {
    double eta_gen = 0.02;      // generator step size, 0.005..0.05
    double eta_exp = 0.05;      // simulated-explainer step size, 0.005..0.05
    int inner_steps = 50;       // mask gradient steps T, 50..100
    int epochs_per_round = 20;  // generator passes over D_B per round
    int max_rounds = 10;
    double convergence_tol = 1e-3;  // relative L_gen improvement per round
    int trigger_size = 6;           // edges added per poisoned graph
    ModelConfig surrogate_model;
    TrainConfig surrogate_train;
    std::uint64_t seed = 0;

    void validate() const;
};

// Per-node scoring network: Linear(F,64)+ReLU, Linear(64,64)+BN+ReLU,
// Linear(64,64)+BN+ReLU, Linear(64,1). A candidate edge scores as the sum of
// its endpoints' outputs; scores are only defined on non-edges. Batch norm
// runs over the graph's nodes in training mode and uses frozen running
// statistics at generation time.
struct AdaptiveGenerator {
    int input_dim = 0;
    int hidden_dim = 64;
    Tensor w1, b1, w2, b2, w3, b3, w4, b4;
    Tensor bn1_gamma, bn1_beta, bn2_gamma, bn2_beta;
    std::vector<double> bn1_mean, bn1_var, bn2_mean, bn2_var;  // running stats
    double eta_gen = 0.01;
    double eta_exp = 0.01;
    int inner_steps = 50;
    int epochs_per_round = 20;
    int trained_rounds = 0;

    std::vector<Tensor> parameters() const;
};

AdaptiveGenerator init_generator(int input_dim, const AdaptiveConfig& config);

// Per-node scalar scores as a differentiable tensor (num_nodes x 1).
// Training mode normalizes over the batch of nodes and updates the running
// statistics; eval mode uses the stored statistics.
Tensor generator_node_scores(AdaptiveGenerator& gen, const Graph& graph, bool training);

// Flattened num_nodes x num_nodes score matrix: e_u + e_v on non-edges,
// -infinity on existing edges and the diagonal.
std::vector<double> score_edges(AdaptiveGenerator& gen, const Graph& graph);

struct CandidateEdge {
    int u = 0;
    int v = 0;
    double score = 0.0;
};

// Highest-scoring non-edge; empty when the graph is complete.
std::optional<CandidateEdge> best_candidate_edge(AdaptiveGenerator& gen, const Graph& graph);

// Simulated explainer (the attacker's inner loop): a per-edge mask on the
// candidate graph, randomly initialized, taking `steps` plain gradient steps
// on cross-entropy against the target label, clamped to [0,1] after each
// step. Returns the final mask aligned with graph.edges.
std::vector<double> simulate_explainer(const GnnModel& surrogate, const Graph& graph,
                                       int target_label, int steps, double eta_exp, Rng& rng);

struct GeneratorTrainLog {
    std::vector<double> round_loss;  // summed final mask weight on inserted edges
    int rounds = 0;
};

// Trains the generator against a surrogate classifier on the clean dataset:
// each epoch inserts the argmax candidate edge per D_B graph, simulates the
// explainer, accumulates the mask weight landing on the inserted edges, and
// steps the generator; after each round D_B is poisoned with the current
// generator and the surrogate is retrained from scratch on the mix.
AdaptiveGenerator train_generator(const Dataset& clean_dataset, const std::vector<int>& d_b_ids,
                                  int target_label, const AdaptiveConfig& config,
                                  GeneratorTrainLog* log = nullptr);

// Adds `s` edges one at a time (argmax over current non-edges, recomputing
// candidates and degree features after each insertion). Dirty-label mode
// rewrites the label to the target.
Graph generate_adaptive_trigger(AdaptiveGenerator& gen, const Graph& graph, int s,
                                int target_label, AttackMode mode, FeatureMode feature_mode,
                                int degree_cap);

// The train ids the adaptive poisoning will hit (deterministic per attack
// seed); also the natural D_B for train_generator.
std::vector<int> select_adaptive_poison_ids(const Dataset& dataset, const AttackConfig& config);

// Poisons the selected train ids in place of the random-trigger path.
std::pair<Dataset, PoisonReport> poison_dataset_adaptive(const Dataset& dataset,
                                                         AdaptiveGenerator& gen,
                                                         const AttackConfig& config);

// Backdoored copies of eligible test graphs via the generator.
std::vector<Graph> make_backdoored_test_adaptive(const Dataset& dataset, AdaptiveGenerator& gen,
                                                 const AttackConfig& config);

void save_generator_json(const std::string& path, const AdaptiveGenerator& gen);
AdaptiveGenerator load_generator_json(const std::string& path);

}  // namespace graphguard
