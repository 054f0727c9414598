#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "graphguard/gnn.hpp"
#include "graphguard/synth.hpp"

using namespace graphguard;

namespace {

// Central finite differences of the cross-entropy loss with respect to one
// coordinate of a leaf tensor.
double numeric_grad(const GnnModel& model, const Graph& g, Tensor& leaf, std::size_t idx,
                    const Tensor* edge_mask, const Tensor* node_mask, int label, double h) {
    auto eval = [&]() {
        return softmax_cross_entropy(forward_logits(model, g, edge_mask, node_mask), label).item();
    };
    const double saved = leaf.values()[idx];
    leaf.mutable_values()[idx] = saved + h;
    const double up = eval();
    leaf.mutable_values()[idx] = saved - h;
    const double down = eval();
    leaf.mutable_values()[idx] = saved;
    return (up - down) / (2.0 * h);
}

struct GradCheckStats {
    int checked = 0;
    double worst = 0.0;
};

// Compares analytic and finite-difference gradients for every parameter,
// the edge mask, and the node mask of one model/graph pair.
GradCheckStats grad_check(GnnArch arch, std::uint64_t seed) {
    Rng rng(seed);
    const int n = 4 + static_cast<int>(rng.uniform_int(5));  // 4..8 nodes
    Graph g = make_random_graph(n, 0.55, 10, rng);
    g.label = static_cast<int>(rng.uniform_int(2));

    ModelConfig mc;
    mc.architecture = arch;
    mc.hidden_dim = 8;
    mc.num_layers = 2;
    mc.seed = seed;
    GnnModel model = init_model(mc, g.feature_dim, 2);
    // Jitter every parameter away from zero-init so no ReLU pre-activation
    // sits exactly on the kink (where the two-sided difference and the
    // subgradient legitimately disagree).
    for (auto& p : model.parameters()) {
        for (auto& v : p.mutable_values()) v += rng.uniform(0.01, 0.05);
    }

    std::vector<double> em(static_cast<std::size_t>(g.num_edges()));
    for (auto& v : em) v = rng.uniform(0.05, 0.95);
    std::vector<double> nm(static_cast<std::size_t>(g.num_nodes));
    for (auto& v : nm) v = rng.uniform(0.05, 0.95);
    Tensor edge_mask = Tensor::leaf(g.num_edges(), 1, em, true);
    Tensor node_mask = Tensor::leaf(g.num_nodes, 1, nm, true);

    std::vector<Tensor> leaves = model.parameters();
    leaves.push_back(edge_mask);
    leaves.push_back(node_mask);
    for (auto& t : leaves) t.zero_grad();

    Tensor loss =
        softmax_cross_entropy(forward_logits(model, g, &edge_mask, &node_mask), g.label);
    backward(loss);

    constexpr double kH = 1e-5;
    constexpr double kTol = 1e-4;
    GradCheckStats stats;
    for (auto& leaf : leaves) {
        const auto analytic = leaf.grad();
        for (std::size_t i = 0; i < leaf.size(); ++i) {
            const double numeric =
                numeric_grad(model, g, leaf, i, &edge_mask, &node_mask, g.label, kH);
            const double rel =
                std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
            stats.worst = std::max(stats.worst, rel);
            CHECK(rel <= kTol);
            ++stats.checked;
        }
    }
    return stats;
}

}  // namespace

TEST_CASE("gradients match central finite differences") {
    int total = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        total += grad_check(GnnArch::kGCN, seed).checked;
        total += grad_check(GnnArch::kGIN, seed).checked;
    }
    CHECK(total > 1000);
}

TEST_CASE("softmax output is normalized and strictly interior") {
    Rng rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        Graph g = make_random_graph(6, 0.5, 10, rng);
        ModelConfig mc;
        mc.architecture = rep % 2 == 0 ? GnnArch::kGCN : GnnArch::kGIN;
        mc.hidden_dim = 16;
        mc.num_layers = 2;
        mc.seed = static_cast<std::uint64_t>(rep);
        GnnModel model = init_model(mc, g.feature_dim, 3);
        const auto p = forward(model, g);
        double sum = 0.0;
        for (double v : p) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("GIN with zero edge mask equals the edgeless graph") {
    Rng rng(9);
    Graph g = make_random_graph(7, 0.6, 10, rng);
    Graph edgeless = make_graph(g.id, g.num_nodes, {}, g.label);
    edgeless.node_features = g.node_features;  // same features, no recompute
    edgeless.feature_dim = g.feature_dim;

    ModelConfig mc;
    mc.architecture = GnnArch::kGIN;
    mc.readout = Readout::kSum;
    mc.hidden_dim = 12;
    mc.num_layers = 2;
    mc.seed = 4;
    GnnModel model = init_model(mc, g.feature_dim, 2);  // eps initialized to zero

    std::vector<double> zeros(static_cast<std::size_t>(g.num_edges()), 0.0);
    const auto masked = forward(model, g, &zeros, nullptr);
    const auto bare = forward(model, edgeless);
    REQUIRE(masked.size() == bare.size());
    for (std::size_t i = 0; i < masked.size(); ++i) CHECK(masked[i] == bare[i]);
}

TEST_CASE("node permutation leaves the prediction unchanged") {
    Rng rng(21);
    for (auto arch : {GnnArch::kGCN, GnnArch::kGIN}) {
        Graph g = make_random_graph(8, 0.5, 10, rng);
        ModelConfig mc;
        mc.architecture = arch;
        mc.hidden_dim = 16;
        mc.num_layers = 3;
        mc.seed = 11;
        GnnModel model = init_model(mc, g.feature_dim, 2);

        std::vector<int> perm(static_cast<std::size_t>(g.num_nodes));
        for (int i = 0; i < g.num_nodes; ++i) perm[static_cast<std::size_t>(i)] = i;
        rng.shuffle(perm);

        std::vector<std::pair<int, int>> edges;
        for (const auto& [u, v] : g.edges)
            edges.emplace_back(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]);
        Graph pg = make_graph(g.id, g.num_nodes, std::move(edges), g.label);
        pg.feature_dim = g.feature_dim;
        pg.node_features.assign(g.node_features.size(), 0.0);
        for (int i = 0; i < g.num_nodes; ++i) {
            for (int j = 0; j < g.feature_dim; ++j)
                pg.node_features[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]) *
                                     g.feature_dim + j] = g.feature(i, j);
        }

        const auto a = forward(model, g);
        const auto b = forward(model, pg);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a[i] - b[i]) <= 1e-9);
    }
}

TEST_CASE("training separates cliques from triangles") {
    Dataset ds = make_clique_vs_triangle(12, 17);
    ModelConfig mc;
    mc.architecture = GnnArch::kGIN;
    mc.hidden_dim = 16;
    mc.num_layers = 2;
    TrainConfig tc;
    tc.epochs = 120;
    tc.learning_rate = 0.01;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        mc.seed = seed;
        tc.seed = seed;
        const auto trained = train_classifier(ds, mc, tc);
        std::vector<Graph> train_graphs;
        for (int id : ds.split_ids(SplitKind::kTrain)) train_graphs.push_back(ds.by_id(id));
        CHECK(accuracy(trained.model, train_graphs) >= 0.95);
        CHECK(trained.loss_curve.back() <= trained.loss_curve.front());
    }
}

TEST_CASE("training is bit-reproducible per seed") {
    Dataset ds = make_clique_vs_triangle(8, 5);
    ModelConfig mc;
    mc.architecture = GnnArch::kGCN;
    mc.hidden_dim = 8;
    mc.num_layers = 2;
    mc.seed = 7;
    TrainConfig tc;
    tc.epochs = 30;
    tc.seed = 7;
    const auto a = train_classifier(ds, mc, tc);
    const auto b = train_classifier(ds, mc, tc);
    CHECK(a.loss_curve == b.loss_curve);
    CHECK(a.model.head_w.values() == b.model.head_w.values());
    for (std::size_t l = 0; l < a.model.gcn_weights.size(); ++l)
        CHECK(a.model.gcn_weights[l].values() == b.model.gcn_weights[l].values());
}

TEST_CASE("training parameter errors") {
    Dataset ds = make_clique_vs_triangle(4, 5);
    ModelConfig mc;
    mc.hidden_dim = 8;
    mc.num_layers = 2;
    TrainConfig tc;
    tc.epochs = 0;
    CHECK_THROWS_AS(train_classifier(ds, mc, tc), ConfigError);
    tc.epochs = 10;
    tc.learning_rate = 0.0;
    CHECK_THROWS_AS(train_classifier(ds, mc, tc), ConfigError);

    // single-class training set
    Dataset mono = ds;
    for (auto& g : mono.graphs) g.label = 0;
    mono.num_classes = 2;
    tc.learning_rate = 0.01;
    CHECK_THROWS_AS(train_classifier(mono, mc, tc), TrainError);
}

TEST_CASE("predict and accuracy contracts") {
    Rng rng(2);
    Graph g = make_random_graph(5, 0.5, 10, rng);
    ModelConfig mc;
    mc.hidden_dim = 8;
    mc.num_layers = 2;
    mc.seed = 1;
    GnnModel model = init_model(mc, g.feature_dim, 2);

    SUBCASE("argmax ties break toward the smaller index") {
        // Zero head: all logits equal, so probs tie exactly.
        for (auto& v : model.head_w.mutable_values()) v = 0.0;
        for (auto& v : model.head_b.mutable_values()) v = 0.0;
        const auto p = predict(model, g);
        CHECK(p.probs[0] == doctest::Approx(0.5));
        CHECK(p.label == 0);
    }
    SUBCASE("empty evaluation set is an error") {
        CHECK_THROWS_AS(accuracy(model, {}), EvalError);
    }
    SUBCASE("feature width mismatch is a shape error") {
        Graph wrong = g;
        wrong.feature_dim = 3;
        wrong.node_features.assign(static_cast<std::size_t>(wrong.num_nodes) * 3, 0.5);
        CHECK_THROWS_AS(predict(model, wrong), ShapeError);
    }
    SUBCASE("mask length mismatch is a shape error") {
        std::vector<double> short_edge_mask(static_cast<std::size_t>(g.num_edges()) - 1, 1.0);
        CHECK_THROWS_AS(forward(model, g, &short_edge_mask, nullptr), ShapeError);
        std::vector<double> long_node_mask(static_cast<std::size_t>(g.num_nodes) + 2, 1.0);
        CHECK_THROWS_AS(forward(model, g, nullptr, &long_node_mask), ShapeError);
    }
    SUBCASE("non-finite mask is a numeric error") {
        std::vector<double> bad(static_cast<std::size_t>(g.num_edges()), 1.0);
        bad[0] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(forward(model, g, &bad, nullptr), NumericError);
    }
}

TEST_CASE("checkpoint round-trip preserves predictions") {
    Dataset ds = make_clique_vs_triangle(6, 8);
    ModelConfig mc;
    mc.architecture = GnnArch::kGIN;
    mc.hidden_dim = 8;
    mc.num_layers = 2;
    mc.seed = 3;
    TrainConfig tc;
    tc.epochs = 20;
    tc.seed = 3;
    const auto trained = train_classifier(ds, mc, tc);
    const std::string path = "test_model_checkpoint.json";
    save_model_json(path, trained.model, tc);
    const GnnModel loaded = load_model_json(path);
    for (const auto& g : ds.graphs) {
        const auto a = forward(trained.model, g);
        const auto b = forward(loaded, g);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
    std::remove(path.c_str());
}
