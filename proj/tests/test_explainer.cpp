#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "graphguard/explainer.hpp"
#include "graphguard/synth.hpp"

using namespace graphguard;

namespace {

GnnModel toy_model(int feature_dim, std::uint64_t seed = 1) {
    ModelConfig mc;
    mc.architecture = GnnArch::kGIN;
    mc.hidden_dim = 12;
    mc.num_layers = 2;
    mc.seed = seed;
    GnnModel m = init_model(mc, feature_dim, 2);
    m.set_trainable(false);
    return m;
}

}  // namespace

TEST_CASE("zero learning rate leaves masks at initialization") {
    Rng rng(3);
    Graph g = make_random_graph(7, 0.5, 10, rng);
    GnnModel model = toy_model(g.feature_dim);

    ExplainerConfig config;
    config.epochs = 12;
    config.learning_rate = 0.0;
    config.seed = 5;
    const Explanation a = explain(model, g, config);

    config.epochs = 1;  // same init, no movement either way
    const Explanation b = explain(model, g, config);
    CHECK(a.edge_mask == b.edge_mask);
    CHECK(a.node_mask == b.node_mask);

    for (std::size_t t = 1; t < a.loss_curve.size(); ++t)
        CHECK(a.loss_curve[t] == doctest::Approx(a.loss_curve[0]).epsilon(1e-12));
    CHECK(a.loss_curve.size() == 13);
}

TEST_CASE("explanation basics on a random graph") {
    Rng rng(8);
    Graph g = make_random_graph(8, 0.5, 10, rng);
    g.label = 1;
    GnnModel model = toy_model(g.feature_dim, 2);

    ExplainerConfig config;  // paper defaults: 1.0, 1.0, 1e-4, 1e-4
    CHECK(config.coeff_edge_entropy == 1.0);
    CHECK(config.coeff_node_entropy == 1.0);
    CHECK(config.coeff_edge_size == 1e-4);
    CHECK(config.coeff_node_size == 1e-4);
    config.epochs = 40;
    config.seed = 9;

    const Explanation e = explain(model, g, config);
    CHECK(static_cast<int>(e.edge_mask.size()) == g.num_edges());
    CHECK(static_cast<int>(e.node_mask.size()) == g.num_nodes);
    CHECK(e.loss_curve.size() == 41);
    CHECK(e.explained_label == 1);

    for (double m : e.edge_mask) {
        CHECK(m > 0.0);
        CHECK(m < 1.0);
    }
    for (double m : e.node_mask) {
        CHECK(m > 0.0);
        CHECK(m < 1.0);
    }
    for (const auto* p : {&e.p_full, &e.p_sub, &e.p_comp}) {
        double sum = 0.0;
        for (double v : *p) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
    for (const auto& [u, v] : e.subgraph_edges) {
        CHECK(std::find(e.subgraph_nodes.begin(), e.subgraph_nodes.end(), u) !=
              e.subgraph_nodes.end());
        CHECK(std::find(e.subgraph_nodes.begin(), e.subgraph_nodes.end(), v) !=
              e.subgraph_nodes.end());
    }

    SUBCASE("reproducible per seed") {
        const Explanation f = explain(model, g, config);
        CHECK(f.edge_mask == e.edge_mask);
        CHECK(f.node_mask == e.node_mask);
        CHECK(f.loss_curve == e.loss_curve);
    }
    SUBCASE("different seed moves the masks") {
        ExplainerConfig other = config;
        other.seed = 10;
        CHECK(explain(model, g, other).edge_mask != e.edge_mask);
    }
}

TEST_CASE("extract_subgraph rule") {
    Graph g = make_graph(0, 3, {{0, 1}, {1, 2}}, 0);
    SUBCASE("all-ones masks keep the whole graph") {
        auto [nodes, edges] = extract_subgraph(g, {0.9, 0.9}, {0.9, 0.9, 0.9}, 0.5);
        CHECK(nodes == std::vector<int>{0, 1, 2});
        CHECK(edges == g.edges);
    }
    SUBCASE("all-zeros masks keep nothing") {
        auto [nodes, edges] = extract_subgraph(g, {0.1, 0.1}, {0.1, 0.1, 0.1}, 0.5);
        CHECK(nodes.empty());
        CHECK(edges.empty());
    }
    SUBCASE("edges lose membership when an endpoint is dropped") {
        auto [nodes, edges] = extract_subgraph(g, {0.9, 0.9}, {0.9, 0.9, 0.1}, 0.5);
        CHECK(nodes == std::vector<int>{0, 1});
        CHECK(edges == std::vector<std::pair<int, int>>{{0, 1}});
    }
    SUBCASE("threshold bounds") {
        CHECK_THROWS_AS(extract_subgraph(g, {0.5, 0.5}, {0.5, 0.5, 0.5}, 0.0), ConfigError);
        CHECK_THROWS_AS(extract_subgraph(g, {0.5, 0.5}, {0.5, 0.5, 0.5}, 1.0), ConfigError);
    }
}

TEST_CASE("edgeless graph yields a degenerate explanation") {
    Graph g = make_graph(4, 5, {}, 0);
    apply_degree_features(g, 10);
    GnnModel model = toy_model(g.feature_dim, 3);
    ExplainerConfig config;
    config.epochs = 10;
    config.seed = 2;
    const Explanation e = explain(model, g, config);
    CHECK(e.degenerate);
    CHECK(e.edge_mask.empty());
    CHECK(e.subgraph_edges.empty());
    CHECK(e.node_mask.size() == 5);
    CHECK(e.loss_curve.size() == 11);
}

TEST_CASE("planted triangle attracts edge mask weight") {
    Dataset ds = make_triangle_motif(12, 21);
    ModelConfig mc;
    mc.architecture = GnnArch::kGIN;
    mc.hidden_dim = 16;
    mc.num_layers = 2;
    TrainConfig tc;
    tc.epochs = 150;
    tc.learning_rate = 0.01;

    int seeds_won = 0;
    const int num_seeds = 10;
    for (int seed = 1; seed <= num_seeds; ++seed) {
        mc.seed = static_cast<std::uint64_t>(seed);
        tc.seed = static_cast<std::uint64_t>(seed);
        const auto trained = train_classifier(ds, mc, tc);

        double motif_weight = 0.0, other_weight = 0.0;
        int motif_n = 0, other_n = 0;
        for (const auto& g : ds.graphs) {
            if (g.label != 1) continue;
            // The chord (u, u+2) pins down the planted triangle.
            int pos = -1;
            for (const auto& [u, v] : g.edges) {
                if (v - u == 2) pos = u;
            }
            REQUIRE(pos >= 0);
            ExplainerConfig config;
            config.epochs = 60;
            config.seed = static_cast<std::uint64_t>(seed * 1000 + g.id);
            const Explanation e = explain(trained.model, g, config);
            for (std::size_t i = 0; i < g.edges.size(); ++i) {
                const auto& [u, v] = g.edges[i];
                const bool in_motif = (u == pos && v == pos + 1) ||
                                      (u == pos + 1 && v == pos + 2) ||
                                      (u == pos && v == pos + 2);
                if (in_motif) {
                    motif_weight += e.edge_mask[i];
                    ++motif_n;
                } else {
                    other_weight += e.edge_mask[i];
                    ++other_n;
                }
            }
        }
        if (motif_weight / motif_n > other_weight / other_n) ++seeds_won;
    }
    CHECK(seeds_won > num_seeds / 2);
}

TEST_CASE("explanation JSON round-trips") {
    Rng rng(4);
    Graph g = make_random_graph(6, 0.5, 10, rng);
    GnnModel model = toy_model(g.feature_dim, 7);
    ExplainerConfig config;
    config.epochs = 8;
    config.seed = 1;
    const Explanation e = explain(model, g, config);
    const Explanation back = explanation_from_json(explanation_to_json(e));
    CHECK(back.edge_mask == e.edge_mask);
    CHECK(back.node_mask == e.node_mask);
    CHECK(back.loss_curve == e.loss_curve);
    CHECK(back.p_full == e.p_full);
    CHECK(back.subgraph_nodes == e.subgraph_nodes);
    CHECK(back.subgraph_edges == e.subgraph_edges);
    CHECK(back.degenerate == e.degenerate);
}
