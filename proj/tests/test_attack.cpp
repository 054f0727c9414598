#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "graphguard/attack.hpp"
#include "graphguard/splits.hpp"
#include "graphguard/synth.hpp"

using namespace graphguard;

namespace {

Graph k_clique(int k) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < k; ++u) {
        for (int v = u + 1; v < k; ++v) edges.emplace_back(u, v);
    }
    return make_graph(-1, k, std::move(edges), 0);
}

Dataset split_bench(std::uint64_t seed) {
    return split_dataset(make_benchmark_corpus(seed), 0.6, 0.2, seed);
}

}  // namespace

TEST_CASE("inject_trigger structural contract") {
    Rng graph_rng(4);
    Graph g = make_random_graph(10, 0.3, 10, graph_rng);
    g.label = 0;
    const Graph trigger = k_clique(4);

    Rng rng(11);
    std::vector<int> hosts;
    Graph out = inject_trigger(g, trigger, 1, AttackMode::kDirtyLabel,
                               FeatureMode::kDegreeOnehot, 10, rng, &hosts);
    CHECK(out.num_nodes == 10);
    CHECK(out.is_backdoored);
    CHECK(out.label == 1);
    CHECK(out.original_label == 0);
    REQUIRE(hosts.size() == 4);

    // Edges among the host set are exactly the mapped trigger edges (K4).
    std::set<int> host_set(hosts.begin(), hosts.end());
    int among_hosts = 0;
    for (const auto& [u, v] : out.edges) {
        if (host_set.count(u) && host_set.count(v)) ++among_hosts;
    }
    CHECK(among_hosts == 6);
    for (int a : hosts) {
        for (int b : hosts) {
            if (a < b) CHECK(out.has_edge(a, b));
        }
    }

    // No self loops or duplicates survive normalization, features recomputed.
    out.validate();
    const auto deg = out.degrees();
    for (int i = 0; i < out.num_nodes; ++i) {
        CHECK(out.feature(i, std::min(deg[static_cast<std::size_t>(i)], 10)) == 1.0);
    }
}

TEST_CASE("inject_trigger label rules") {
    Rng graph_rng(5);
    Graph g = make_random_graph(8, 0.4, 10, graph_rng);
    const Graph trigger = k_clique(3);
    SUBCASE("dirty-label rewrites a label-0 graph to the target") {
        Graph in = g;
        in.label = 0;
        in.original_label = 0;
        Rng rng(1);
        CHECK(inject_trigger(in, trigger, 1, AttackMode::kDirtyLabel,
                             FeatureMode::kDegreeOnehot, 10, rng)
                  .label == 1);
    }
    SUBCASE("clean-label keeps the label even when it equals the target") {
        Graph in = g;
        in.label = 1;
        in.original_label = 1;
        Rng rng(1);
        const Graph out = inject_trigger(in, trigger, 1, AttackMode::kCleanLabel,
                                         FeatureMode::kDegreeOnehot, 10, rng);
        CHECK(out.label == 1);
        CHECK(out.is_backdoored);
    }
    SUBCASE("trigger larger than graph is an error") {
        Rng rng(1);
        CHECK_THROWS_AS(inject_trigger(g, k_clique(9), 1, AttackMode::kDirtyLabel,
                                       FeatureMode::kDegreeOnehot, 10, rng),
                        DataError);
    }
}

TEST_CASE("node-label feature mode preserves features on injection") {
    Graph g = make_graph(0, 6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}, 0);
    g.feature_dim = 2;
    g.node_features = {1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1};
    Rng rng(2);
    const Graph out = inject_trigger(g, k_clique(3), 1, AttackMode::kDirtyLabel,
                                     FeatureMode::kNodeLabelOnehot, 10, rng);
    CHECK(out.node_features == g.node_features);
}

TEST_CASE("poison_dataset") {
    Dataset ds = split_bench(7);
    AttackConfig config;
    config.trigger.model = TriggerModel::kER;
    config.trigger.size = 6;
    config.trigger.er_p = 1.0;
    config.trigger.seed = 5;
    config.poison_rate = 0.2;
    config.target_label = 1;
    config.seed = 31;

    SUBCASE("dirty-label poisons exactly round(rate * train)") {
        const auto train_count = ds.split_ids(SplitKind::kTrain).size();
        auto [poisoned, report] = poison_dataset(ds, config);
        CHECK(report.poisoned_ids.size() ==
              static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(train_count))));
        for (int id : report.poisoned_ids) {
            CHECK(poisoned.by_id(id).is_backdoored);
            CHECK(poisoned.by_id(id).label == 1);
        }
        // labels differ from the original only on poisoned ids
        std::set<int> pset(report.poisoned_ids.begin(), report.poisoned_ids.end());
        for (int i = 0; i < ds.size(); ++i) {
            if (!pset.count(ds.graphs[static_cast<std::size_t>(i)].id))
                CHECK(poisoned.graphs[static_cast<std::size_t>(i)].label ==
                      ds.graphs[static_cast<std::size_t>(i)].label);
        }
        // validation and test untouched
        for (auto kind : {SplitKind::kValidation, SplitKind::kTest}) {
            for (int id : poisoned.split_ids(kind)) CHECK_FALSE(poisoned.by_id(id).is_backdoored);
        }
        // ER(p=1): the host set forms a clique in every poisoned graph
        for (const auto& [id, hosts] : report.trigger_node_map) {
            const Graph& g = poisoned.by_id(id);
            for (std::size_t a = 0; a < hosts.size(); ++a) {
                for (std::size_t b = a + 1; b < hosts.size(); ++b)
                    CHECK(g.has_edge(hosts[a], hosts[b]));
            }
        }
    }
    SUBCASE("poisoning is reproducible per seed") {
        auto [p1, r1] = poison_dataset(ds, config);
        auto [p2, r2] = poison_dataset(ds, config);
        CHECK(r1.poisoned_ids == r2.poisoned_ids);
        for (int id : r1.poisoned_ids) CHECK(p1.by_id(id).edges == p2.by_id(id).edges);
    }
    SUBCASE("degenerate rate errors instead of silently no-op") {
        AttackConfig tiny = config;
        tiny.poison_rate = 0.001;
        CHECK_THROWS_AS(poison_dataset(ds, tiny), ConfigError);
    }
    SUBCASE("clean-label draws only from the target class") {
        AttackConfig clean = config;
        clean.mode = AttackMode::kCleanLabel;
        clean.poison_rate = 0.1;
        auto [poisoned, report] = poison_dataset(ds, clean);
        for (int id : report.poisoned_ids) {
            CHECK(poisoned.by_id(id).label == 1);
            CHECK(poisoned.by_id(id).original_label == 1);
        }
    }
    SUBCASE("clean-label with too few target graphs errors") {
        AttackConfig clean = config;
        clean.mode = AttackMode::kCleanLabel;
        clean.poison_rate = 1.0;  // needs every train graph to be class 1
        CHECK_THROWS_AS(poison_dataset(ds, clean), ConfigError);
    }
}

TEST_CASE("attack_success_rate counting") {
    // Tiny hand-made model-free check via a constant-output model: build a
    // 2-class model with a biased head so it always answers one class.
    Dataset ds = make_clique_vs_triangle(6, 3);
    ModelConfig mc;
    mc.hidden_dim = 8;
    mc.num_layers = 2;
    mc.seed = 1;
    GnnModel model = init_model(mc, ds.feature_dim(), 2);
    for (auto& v : model.head_w.mutable_values()) v = 0.0;
    model.head_b.mutable_values() = {0.0, 5.0};  // always predicts class 1

    std::vector<Graph> backdoored;
    for (int i = 0; i < 10; ++i) {
        Graph g = ds.graphs[static_cast<std::size_t>(i)];
        g.is_backdoored = true;
        g.original_label = i < 5 ? 0 : 1;  // 5 eligible (label != 1)
        backdoored.push_back(g);
    }
    SUBCASE("constant-target model gives 1.0") {
        CHECK(attack_success_rate(model, backdoored, 1) == 1.0);
    }
    SUBCASE("never-target model gives 0.0") {
        model.head_b.mutable_values() = {5.0, 0.0};
        CHECK(attack_success_rate(model, backdoored, 1) == 0.0);
    }
    SUBCASE("9 of 10 eligible flips gives 0.9") {
        // a trained clique-size classifier: 6-cliques go to class 1,
        // triangles to class 0; mark one triangle among ten eligible inputs
        ModelConfig tmc;
        tmc.architecture = GnnArch::kGIN;
        tmc.hidden_dim = 16;
        tmc.num_layers = 2;
        tmc.seed = 4;
        TrainConfig ttc;
        ttc.epochs = 120;
        ttc.seed = 4;
        const auto trained = train_classifier(ds, tmc, ttc);
        std::vector<Graph> eligible;
        int id = 0;
        auto take = [&](int label, std::size_t count) {
            std::vector<Graph> correct;
            for (const auto& g : ds.graphs) {
                if (g.label == label && predict(trained.model, g).label == g.label)
                    correct.push_back(g);
            }
            REQUIRE_FALSE(correct.empty());
            while (eligible.size() < count) {
                Graph copy = correct[eligible.size() % correct.size()];
                copy.id = id++;
                copy.is_backdoored = true;
                copy.original_label = 0;
                eligible.push_back(copy);
            }
        };
        take(1, 9);  // nine predicted as the target
        take(0, 10); // one predicted as its true class 0
        REQUIRE(eligible.size() == 10);
        CHECK(attack_success_rate(trained.model, eligible, 1) == doctest::Approx(0.9));
    }
    SUBCASE("empty eligible set errors") {
        for (auto& g : backdoored) g.original_label = 1;
        CHECK_THROWS_AS(attack_success_rate(model, backdoored, 1), EvalError);
    }
    SUBCASE("non-backdoored input rejected") {
        backdoored[0].is_backdoored = false;
        CHECK_THROWS_AS(attack_success_rate(model, backdoored, 1), EvalError);
    }
}

TEST_CASE("make_backdoored_test covers eligible test graphs") {
    Dataset ds = split_bench(13);
    AttackConfig config;
    config.trigger.model = TriggerModel::kER;
    config.trigger.size = 6;
    config.trigger.er_p = 1.0;
    config.seed = 3;
    config.target_label = 1;
    const auto copies = make_backdoored_test(ds, config);
    int expected = 0;
    for (int id : ds.split_ids(SplitKind::kTest)) {
        const Graph& g = ds.by_id(id);
        if (g.original_label != 1 && g.num_nodes >= 6) ++expected;
    }
    CHECK(static_cast<int>(copies.size()) == expected);
    for (const auto& g : copies) {
        CHECK(g.is_backdoored);
        CHECK(g.original_label != 1);
    }
}
