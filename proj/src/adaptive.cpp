#include "graphguard/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "graphguard/optim.hpp"

namespace graphguard {

void AdaptiveConfig::validate() const {
    if (eta_gen <= 0.0 || eta_exp <= 0.0) throw ConfigError("generator step sizes must be positive");
    if (inner_steps < 1) throw ConfigError("inner_steps must be >= 1");
    if (epochs_per_round < 1) throw ConfigError("epochs_per_round must be >= 1");
    if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    if (trigger_size < 1) throw ConfigError("trigger_size must be >= 1");
}

std::vector<Tensor> AdaptiveGenerator::parameters() const {
    return {w1, b1, w2, b2, w3, b3, w4, b4, bn1_gamma, bn1_beta, bn2_gamma, bn2_beta};
}

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;

Tensor glorot(int rows, int cols, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    for (auto& x : w) x = rng.uniform(-a, a);
    return Tensor::leaf(rows, cols, std::move(w), true);
}

// Batch norm over the node dimension. Per-graph batches are far too small
// for batch-statistic normalization to give a stable ranking surface, so
// normalization always applies the running statistics; training mode
// refreshes them from the batch first. Scores seen while training therefore
// match the scores used for candidate selection and generation.
Tensor batch_norm(const Tensor& z, const Tensor& gamma, const Tensor& beta,
                  std::vector<double>& run_mean, std::vector<double>& run_var, bool training) {
    const int m = z.cols();
    const int n = z.rows();
    if (training) {
        for (int j = 0; j < m; ++j) {
            double mu = 0.0;
            for (int i = 0; i < n; ++i) mu += z.value(i, j);
            mu /= static_cast<double>(n);
            double var = 0.0;
            for (int i = 0; i < n; ++i) var += (z.value(i, j) - mu) * (z.value(i, j) - mu);
            var /= static_cast<double>(n);
            run_mean[static_cast<std::size_t>(j)] =
                (1.0 - kBnMomentum) * run_mean[static_cast<std::size_t>(j)] + kBnMomentum * mu;
            run_var[static_cast<std::size_t>(j)] =
                (1.0 - kBnMomentum) * run_var[static_cast<std::size_t>(j)] + kBnMomentum * var;
        }
    }
    Tensor mu = Tensor::leaf(1, m, run_mean, false);
    std::vector<double> inv(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        inv[static_cast<std::size_t>(j)] =
            1.0 / std::sqrt(run_var[static_cast<std::size_t>(j)] + kBnEps);
    Tensor norm = mul_rowvec(sub_rowvec(z, mu), Tensor::leaf(1, m, std::move(inv), false));
    return add_rowvec(mul_rowvec(norm, gamma), beta);
}

std::vector<std::pair<int, int>> non_edges(const Graph& g) {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < g.num_nodes; ++u) {
        for (int v = u + 1; v < g.num_nodes; ++v) {
            if (!g.has_edge(u, v)) out.emplace_back(u, v);
        }
    }
    return out;
}

}  // namespace

AdaptiveGenerator init_generator(int input_dim, const AdaptiveConfig& config) {
    config.validate();
    if (input_dim < 1) throw ConfigError("generator input width must be positive");
    Rng rng(mix_seed(config.seed, 0x6A3Eu));
    AdaptiveGenerator g;
    g.input_dim = input_dim;
    const int h = g.hidden_dim;
    g.w1 = glorot(input_dim, h, rng);
    g.b1 = Tensor::zeros(1, h, true);
    g.w2 = glorot(h, h, rng);
    g.b2 = Tensor::zeros(1, h, true);
    g.w3 = glorot(h, h, rng);
    g.b3 = Tensor::zeros(1, h, true);
    g.w4 = glorot(h, 1, rng);
    g.b4 = Tensor::zeros(1, 1, true);
    g.bn1_gamma = Tensor::leaf(1, h, std::vector<double>(static_cast<std::size_t>(h), 1.0), true);
    g.bn1_beta = Tensor::zeros(1, h, true);
    g.bn2_gamma = Tensor::leaf(1, h, std::vector<double>(static_cast<std::size_t>(h), 1.0), true);
    g.bn2_beta = Tensor::zeros(1, h, true);
    g.bn1_mean.assign(static_cast<std::size_t>(h), 0.0);
    g.bn1_var.assign(static_cast<std::size_t>(h), 1.0);
    g.bn2_mean.assign(static_cast<std::size_t>(h), 0.0);
    g.bn2_var.assign(static_cast<std::size_t>(h), 1.0);
    g.eta_gen = config.eta_gen;
    g.eta_exp = config.eta_exp;
    g.inner_steps = config.inner_steps;
    g.epochs_per_round = config.epochs_per_round;
    return g;
}

Tensor generator_node_scores(AdaptiveGenerator& gen, const Graph& graph, bool training) {
    if (graph.feature_dim != gen.input_dim)
        throw ShapeError("generator: feature width " + std::to_string(graph.feature_dim) +
                         " does not match input " + std::to_string(gen.input_dim));
    Tensor x = Tensor::leaf(graph.num_nodes, graph.feature_dim, graph.node_features, false);
    Tensor h1 = relu(add_rowvec(matmul(x, gen.w1), gen.b1));
    Tensor z2 = add_rowvec(matmul(h1, gen.w2), gen.b2);
    Tensor h2 = relu(batch_norm(z2, gen.bn1_gamma, gen.bn1_beta, gen.bn1_mean, gen.bn1_var, training));
    Tensor z3 = add_rowvec(matmul(h2, gen.w3), gen.b3);
    Tensor h3 = relu(batch_norm(z3, gen.bn2_gamma, gen.bn2_beta, gen.bn2_mean, gen.bn2_var, training));
    return add_rowvec(matmul(h3, gen.w4), gen.b4);  // num_nodes x 1
}

std::vector<double> score_edges(AdaptiveGenerator& gen, const Graph& graph) {
    const Tensor e = generator_node_scores(gen, graph, /*training=*/false);
    const int n = graph.num_nodes;
    std::vector<double> scores(static_cast<std::size_t>(n) * n,
                               -std::numeric_limits<double>::infinity());
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (u == v || graph.has_edge(u, v)) continue;
            scores[static_cast<std::size_t>(u) * n + v] =
                e.values()[static_cast<std::size_t>(u)] + e.values()[static_cast<std::size_t>(v)];
        }
    }
    return scores;
}

std::optional<CandidateEdge> best_candidate_edge(AdaptiveGenerator& gen, const Graph& graph) {
    const auto candidates = non_edges(graph);
    if (candidates.empty()) return std::nullopt;
    const Tensor e = generator_node_scores(gen, graph, /*training=*/false);
    CandidateEdge best{candidates[0].first, candidates[0].second,
                       -std::numeric_limits<double>::infinity()};
    for (const auto& [u, v] : candidates) {
        const double s =
            e.values()[static_cast<std::size_t>(u)] + e.values()[static_cast<std::size_t>(v)];
        if (s > best.score) best = {u, v, s};
    }
    return best;
}

std::vector<double> simulate_explainer(const GnnModel& surrogate, const Graph& graph,
                                       int target_label, int steps, double eta_exp, Rng& rng) {
    if (steps < 1) throw ConfigError("simulate_explainer: steps must be >= 1");
    const GnnModel frozen =
        surrogate.head_w.requires_grad() ? surrogate.clone(false) : surrogate;
    const int e = graph.num_edges();
    std::vector<double> mask(static_cast<std::size_t>(e));
    for (auto& m : mask) m = rng.uniform();
    for (int t = 0; t < steps; ++t) {
        Tensor mask_t = Tensor::leaf(e, 1, mask, true);
        Tensor loss =
            softmax_cross_entropy(forward_logits(frozen, graph, &mask_t, nullptr), target_label);
        if (!std::isfinite(loss.item()))
            throw NumericError("simulated explainer loss became non-finite at step " +
                               std::to_string(t));
        backward(loss);
        const auto& grad = mask_t.grad();
        for (int i = 0; i < e; ++i) {
            mask[static_cast<std::size_t>(i)] =
                std::clamp(mask[static_cast<std::size_t>(i)] - eta_exp * grad[static_cast<std::size_t>(i)],
                           0.0, 1.0);
        }
    }
    return mask;
}

namespace {

// Appends one edge to a graph without touching features or labels.
Graph with_edge(const Graph& g, int u, int v) {
    auto edges = g.edges;
    edges.emplace_back(u, v);
    Graph out = make_graph(g.id, g.num_nodes, std::move(edges), g.label);
    out.original_label = g.original_label;
    out.is_backdoored = g.is_backdoored;
    out.node_features = g.node_features;
    out.feature_dim = g.feature_dim;
    return out;
}

}  // namespace

AdaptiveGenerator train_generator(const Dataset& clean_dataset, const std::vector<int>& d_b_ids,
                                  int target_label, const AdaptiveConfig& config,
                                  GeneratorTrainLog* log) {
    config.validate();
    if (d_b_ids.empty()) throw ConfigError("train_generator: D_B is empty");
    if (target_label < 0 || target_label >= clean_dataset.num_classes)
        throw ConfigError("train_generator: target label out of range");

    std::vector<Graph> train_graphs;
    std::set<int> d_b_set(d_b_ids.begin(), d_b_ids.end());
    for (std::size_t i = 0; i < clean_dataset.graphs.size(); ++i) {
        if (clean_dataset.split_of[i] == SplitKind::kTrain)
            train_graphs.push_back(clean_dataset.graphs[i]);
    }
    std::vector<Graph> d_b;
    for (const auto& g : train_graphs) {
        if (d_b_set.count(g.id)) d_b.push_back(g);
    }
    if (d_b.size() != d_b_ids.size())
        throw ConfigError("train_generator: D_B must be a subset of the train split");

    AdaptiveGenerator gen = init_generator(clean_dataset.feature_dim(), config);
    Optimizer opt(gen.parameters(), OptimizerKind::kAdam, config.eta_gen);

    TrainConfig surrogate_train = config.surrogate_train;
    surrogate_train.seed = mix_seed(config.seed, 0x5u);
    GnnModel surrogate =
        train_on_graphs(train_graphs, clean_dataset.num_classes, config.surrogate_model,
                        surrogate_train)
            .model;

    // Evaluation pass with the generator held fixed: sum over D_B of the
    // final simulated mask weight on the argmax-inserted edge, averaged over
    // a few mask initializations. This is the reported L_gen; it is measured
    // once before training and after each round so the trace is not
    // confounded by mid-round updates.
    constexpr int kMeasureReps = 3;
    auto measure = [&](int tag) {
        double total = 0.0;
        for (std::size_t gi = 0; gi < d_b.size(); ++gi) {
            const Graph& g = d_b[gi];
            const auto choice = best_candidate_edge(gen, g);
            if (!choice) continue;
            Graph candidate_graph = with_edge(g, choice->u, choice->v);
            const auto inserted = std::make_pair(std::min(choice->u, choice->v),
                                                 std::max(choice->u, choice->v));
            std::size_t inserted_index = 0;
            for (std::size_t ei = 0; ei < candidate_graph.edges.size(); ++ei) {
                if (candidate_graph.edges[ei] == inserted) inserted_index = ei;
            }
            for (int rep = 0; rep < kMeasureReps; ++rep) {
                Rng sim_rng(mix_seed(config.seed, 0x200000ull * static_cast<unsigned>(tag + 1) +
                                                      0x10000ull * static_cast<unsigned>(rep) + gi));
                const auto mask = simulate_explainer(surrogate, candidate_graph, target_label,
                                                     config.inner_steps, config.eta_exp, sim_rng);
                total += mask[inserted_index] / static_cast<double>(kMeasureReps);
            }
        }
        return total;
    };

    double prev_round_loss = measure(0);
    if (log) log->round_loss.push_back(prev_round_loss);
    for (int round = 0; round < config.max_rounds; ++round) {
        for (int epoch = 0; epoch < config.epochs_per_round; ++epoch) {
            Tensor epoch_objective;  // sigma(candidate score) * mask advantage
            int terms = 0;
            Rng explore_rng(mix_seed(config.seed, 0x300000ull * static_cast<unsigned>(round + 1) +
                                                      static_cast<unsigned>(epoch)));
            for (std::size_t gi = 0; gi < d_b.size(); ++gi) {
                const Graph& g = d_b[gi];
                const auto candidates = non_edges(g);
                if (candidates.empty()) continue;

                // Frozen-stats scores decide the exploit pick, so training,
                // measurement and generation select edges the same way; the
                // training-mode pass below carries the gradient and refreshes
                // the batch-norm statistics.
                const auto choice = best_candidate_edge(gen, g);
                Tensor node_scores = generator_node_scores(gen, g, /*training=*/true);

                // The argmax insertion is not differentiable, so the
                // generator learns by dueling comparisons: the exploit pick
                // and one random challenger are both inserted and simulated,
                // and the score difference moves toward whichever edge
                // earned the lower final mask. The incumbent only keeps its
                // rank while no tried challenger beats it.
                std::pair<int, int> exploit{choice->u, choice->v};
                std::pair<int, int> challenger = exploit;
                for (int attempt = 0; attempt < 16 && challenger == exploit; ++attempt) {
                    challenger = candidates[static_cast<std::size_t>(
                        explore_rng.uniform_int(static_cast<std::int64_t>(candidates.size())))];
                }
                if (challenger == exploit) continue;  // single-candidate graph

                auto inserted_mask = [&](const std::pair<int, int>& e, int stream) {
                    Graph candidate_graph = with_edge(g, e.first, e.second);
                    Rng sim_rng(mix_seed(config.seed,
                                         0x100000ull * static_cast<unsigned>(round + 1) +
                                             0x1000ull * static_cast<unsigned>(stream) + gi));
                    const auto mask =
                        simulate_explainer(surrogate, candidate_graph, target_label,
                                           config.inner_steps, config.eta_exp, sim_rng);
                    const auto key = std::make_pair(std::min(e.first, e.second),
                                                    std::max(e.first, e.second));
                    for (std::size_t ei = 0; ei < candidate_graph.edges.size(); ++ei) {
                        if (candidate_graph.edges[ei] == key) return mask[ei];
                    }
                    return 0.0;
                };
                const double m_exploit = inserted_mask(exploit, 0);
                const double m_challenger = inserted_mask(challenger, 1);
                ++terms;
                // Deadband: most candidate pairs tie near zero mask, and
                // those comparisons are pure noise. Only clearly separated
                // outcomes move the scores.
                if (std::abs(m_exploit - m_challenger) < 0.2) continue;

                Tensor s_exploit = add(pick(node_scores, exploit.first, 0),
                                       pick(node_scores, exploit.second, 0));
                Tensor s_challenger = add(pick(node_scores, challenger.first, 0),
                                          pick(node_scores, challenger.second, 0));
                Tensor term =
                    mul_const(sub(s_exploit, s_challenger), m_exploit - m_challenger);
                epoch_objective =
                    epoch_objective.defined() ? add(epoch_objective, term) : term;
            }
            if (terms == 0) throw DataError("train_generator: no graph in D_B has a free edge slot");
            if (!epoch_objective.defined()) continue;  // every duel fell in the deadband
            backward(epoch_objective);
            opt.step();
        }
        const double round_loss = measure(round + 1);
        if (log) log->round_loss.push_back(round_loss);
        ++gen.trained_rounds;
        if (log) log->rounds = gen.trained_rounds;

        const double improvement =
            (prev_round_loss - round_loss) / std::max(std::abs(prev_round_loss), 1e-12);
        prev_round_loss = round_loss;
        if (improvement < config.convergence_tol && round + 1 < config.max_rounds) break;
        if (round + 1 == config.max_rounds) break;

        // Poison D_B with the current generator and retrain the surrogate
        // from scratch on the mix.
        std::vector<Graph> mixed;
        for (const auto& g : train_graphs) {
            if (d_b_set.count(g.id)) {
                mixed.push_back(generate_adaptive_trigger(gen, g, config.trigger_size,
                                                          target_label, AttackMode::kDirtyLabel,
                                                          clean_dataset.feature_mode,
                                                          clean_dataset.degree_cap));
            } else {
                mixed.push_back(g);
            }
        }
        TrainConfig retrain = config.surrogate_train;
        retrain.seed = mix_seed(config.seed, 0x600ull + static_cast<unsigned>(round));
        surrogate = train_on_graphs(mixed, clean_dataset.num_classes, config.surrogate_model,
                                    retrain)
                        .model;
    }
    return gen;
}

Graph generate_adaptive_trigger(AdaptiveGenerator& gen, const Graph& graph, int s,
                                int target_label, AttackMode mode, FeatureMode feature_mode,
                                int degree_cap) {
    if (s < 1) throw ConfigError("adaptive trigger needs at least one edge");
    const long capacity = static_cast<long>(graph.num_nodes) * (graph.num_nodes - 1) / 2 -
                          graph.num_edges();
    if (capacity < s)
        throw DataError("graph " + std::to_string(graph.id) + " has only " +
                        std::to_string(capacity) + " free node pairs, need " + std::to_string(s));

    Graph current = graph;
    for (int i = 0; i < s; ++i) {
        const auto pick = best_candidate_edge(gen, current);
        if (!pick) throw DataError("no candidate edge left on graph " + std::to_string(graph.id));
        current = with_edge(current, pick->u, pick->v);
        if (feature_mode == FeatureMode::kDegreeOnehot) apply_degree_features(current, degree_cap);
    }
    if (mode == AttackMode::kDirtyLabel) current.label = target_label;
    current.original_label = graph.original_label;
    current.is_backdoored = true;
    return current;
}

std::vector<int> select_adaptive_poison_ids(const Dataset& dataset, const AttackConfig& config) {
    config.validate(dataset.num_classes);
    const auto train_ids = dataset.split_ids(SplitKind::kTrain);
    const int n_poison =
        static_cast<int>(std::lround(config.poison_rate * static_cast<double>(train_ids.size())));
    if (n_poison < 1) throw ConfigError("poison_rate rounds to zero poisoned graphs");

    std::vector<int> eligible;
    for (int id : train_ids) {
        const Graph& g = dataset.by_id(id);
        const long cap = static_cast<long>(g.num_nodes) * (g.num_nodes - 1) / 2 - g.num_edges();
        if (cap < config.trigger.size) continue;
        if (config.mode == AttackMode::kCleanLabel && g.label != config.target_label) continue;
        eligible.push_back(id);
    }
    if (static_cast<int>(eligible.size()) < n_poison)
        throw ConfigError("not enough eligible train graphs to poison " + std::to_string(n_poison));

    Rng select_rng(mix_seed(config.seed, 0x73656C65u));
    select_rng.shuffle(eligible);
    std::vector<int> poisoned(eligible.begin(), eligible.begin() + n_poison);
    std::sort(poisoned.begin(), poisoned.end());
    return poisoned;
}

std::pair<Dataset, PoisonReport> poison_dataset_adaptive(const Dataset& dataset,
                                                         AdaptiveGenerator& gen,
                                                         const AttackConfig& config) {
    const std::vector<int> poisoned = select_adaptive_poison_ids(dataset, config);
    Dataset out = dataset;
    PoisonReport report;
    report.poisoned_ids = poisoned;
    std::set<int> poison_set(poisoned.begin(), poisoned.end());
    for (auto& g : out.graphs) {
        if (!poison_set.count(g.id)) continue;
        Graph before = g;
        g = generate_adaptive_trigger(gen, g, config.trigger.size, config.target_label,
                                      config.mode, out.feature_mode, out.degree_cap);
        // New edges' endpoints stand in for the host map.
        std::set<int> touched;
        for (const auto& e : g.edges) {
            if (!before.has_edge(e.first, e.second)) {
                touched.insert(e.first);
                touched.insert(e.second);
            }
        }
        report.trigger_node_map[g.id] = std::vector<int>(touched.begin(), touched.end());
    }
    out.validate();
    return {std::move(out), std::move(report)};
}

std::vector<Graph> make_backdoored_test_adaptive(const Dataset& dataset, AdaptiveGenerator& gen,
                                                 const AttackConfig& config) {
    config.validate(dataset.num_classes);
    std::vector<Graph> out;
    for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
        if (dataset.split_of[i] != SplitKind::kTest) continue;
        const Graph& g = dataset.graphs[i];
        if (g.original_label == config.target_label) continue;
        const long cap = static_cast<long>(g.num_nodes) * (g.num_nodes - 1) / 2 - g.num_edges();
        if (cap < config.trigger.size) continue;
        out.push_back(generate_adaptive_trigger(gen, g, config.trigger.size, config.target_label,
                                                AttackMode::kCleanLabel, dataset.feature_mode,
                                                dataset.degree_cap));
    }
    return out;
}

namespace {

nlohmann::json tensor_to_json(const Tensor& t) {
    return nlohmann::json{{"rows", t.rows()}, {"cols", t.cols()}, {"values", t.values()}};
}

Tensor tensor_from_json(const nlohmann::json& j, bool trainable) {
    return Tensor::leaf(j.at("rows").get<int>(), j.at("cols").get<int>(),
                        j.at("values").get<std::vector<double>>(), trainable);
}

}  // namespace

void save_generator_json(const std::string& path, const AdaptiveGenerator& gen) {
    nlohmann::json j;
    j["input_dim"] = gen.input_dim;
    j["hidden_dim"] = gen.hidden_dim;
    j["w1"] = tensor_to_json(gen.w1);
    j["b1"] = tensor_to_json(gen.b1);
    j["w2"] = tensor_to_json(gen.w2);
    j["b2"] = tensor_to_json(gen.b2);
    j["w3"] = tensor_to_json(gen.w3);
    j["b3"] = tensor_to_json(gen.b3);
    j["w4"] = tensor_to_json(gen.w4);
    j["b4"] = tensor_to_json(gen.b4);
    j["bn1_gamma"] = tensor_to_json(gen.bn1_gamma);
    j["bn1_beta"] = tensor_to_json(gen.bn1_beta);
    j["bn2_gamma"] = tensor_to_json(gen.bn2_gamma);
    j["bn2_beta"] = tensor_to_json(gen.bn2_beta);
    j["bn1_mean"] = gen.bn1_mean;
    j["bn1_var"] = gen.bn1_var;
    j["bn2_mean"] = gen.bn2_mean;
    j["bn2_var"] = gen.bn2_var;
    j["eta_gen"] = gen.eta_gen;
    j["eta_exp"] = gen.eta_exp;
    j["inner_steps"] = gen.inner_steps;
    j["epochs_per_round"] = gen.epochs_per_round;
    j["trained_rounds"] = gen.trained_rounds;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << "\n";
}

AdaptiveGenerator load_generator_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path);
    nlohmann::json j;
    in >> j;
    AdaptiveGenerator g;
    g.input_dim = j.at("input_dim").get<int>();
    g.hidden_dim = j.at("hidden_dim").get<int>();
    g.w1 = tensor_from_json(j.at("w1"), false);
    g.b1 = tensor_from_json(j.at("b1"), false);
    g.w2 = tensor_from_json(j.at("w2"), false);
    g.b2 = tensor_from_json(j.at("b2"), false);
    g.w3 = tensor_from_json(j.at("w3"), false);
    g.b3 = tensor_from_json(j.at("b3"), false);
    g.w4 = tensor_from_json(j.at("w4"), false);
    g.b4 = tensor_from_json(j.at("b4"), false);
    g.bn1_gamma = tensor_from_json(j.at("bn1_gamma"), false);
    g.bn1_beta = tensor_from_json(j.at("bn1_beta"), false);
    g.bn2_gamma = tensor_from_json(j.at("bn2_gamma"), false);
    g.bn2_beta = tensor_from_json(j.at("bn2_beta"), false);
    g.bn1_mean = j.at("bn1_mean").get<std::vector<double>>();
    g.bn1_var = j.at("bn1_var").get<std::vector<double>>();
    g.bn2_mean = j.at("bn2_mean").get<std::vector<double>>();
    g.bn2_var = j.at("bn2_var").get<std::vector<double>>();
    g.eta_gen = j.at("eta_gen").get<double>();
    g.eta_exp = j.at("eta_exp").get<double>();
    g.inner_steps = j.at("inner_steps").get<int>();
    g.epochs_per_round = j.at("epochs_per_round").get<int>();
    g.trained_rounds = j.at("trained_rounds").get<int>();
    return g;
}

}  // namespace graphguard
