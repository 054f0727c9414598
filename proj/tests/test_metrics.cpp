#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "graphguard/detector.hpp"
#include "graphguard/metrics.hpp"
#include "graphguard/synth.hpp"

using namespace graphguard;

#include "oracles.hpp"

namespace {

// Random subset of {0..n-1}.
std::vector<int> random_subset(int n, Rng& rng) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
        if (rng.bernoulli(0.4)) out.push_back(i);
    }
    return out;
}

std::vector<double> random_curve(int len, Rng& rng) {
    std::vector<double> curve;
    double v = rng.uniform(1.0, 5.0);
    for (int i = 0; i < len; ++i) {
        v += rng.normal(0.0, 0.4) - 0.05;
        curve.push_back(v);
    }
    return curve;
}

}  // namespace

TEST_CASE("prediction confidence trivials") {
    CHECK(prediction_confidence({0.2, 0.8}) == 0.8);
    CHECK(prediction_confidence({0.25, 0.25, 0.25, 0.25}) == 0.25);
    CHECK(prediction_confidence({0.1, 0.3, 0.6}) == 0.6);
}

TEST_CASE("fidelity and explainability") {
    SUBCASE("identical vectors zero out the corresponding side") {
        const std::vector<double> p{0.7, 0.3}, y{1.0, 0.0};
        CHECK(fidelity(p, p, {0.5, 0.5}, y).minus == 0.0);
        CHECK(fidelity(p, {0.5, 0.5}, p, y).plus == 0.0);
    }
    SUBCASE("hand-computed Euclidean example") {
        const auto fid = fidelity({0.9, 0.1}, {0.9, 0.1}, {0.5, 0.5}, {1.0, 0.0});
        CHECK(fid.plus == doctest::Approx(0.565685).epsilon(1e-5));
        CHECK(fid.minus == 0.0);
    }
    SUBCASE("explainability is the signed difference") {
        CHECK(explainability(0.8, 0.1) == doctest::Approx(0.7));
        CHECK(explainability(0.0, 0.0) == 0.0);
        CHECK(explainability(0.1, 0.8) == doctest::Approx(-0.7));
    }
}

TEST_CASE("connectivity examples") {
    Graph tri = make_graph(0, 3, {{0, 1}, {1, 2}, {0, 2}}, 0);
    CHECK(connectivity({0, 1, 2}, tri) == 1.0);

    Graph empty3 = make_graph(0, 3, {}, 0);
    CHECK(connectivity({0, 1, 2}, empty3) == 0.0);

    Graph path = make_graph(0, 4, {{0, 1}, {1, 2}, {2, 3}}, 0);
    CHECK(connectivity({0, 1, 2, 3}, path) == doctest::Approx(0.5));

    SUBCASE("degenerate subgraphs score 0 instead of crashing") {
        CHECK(connectivity({}, tri) == 0.0);
        CHECK(connectivity({1}, tri) == 0.0);
    }
    SUBCASE("literal-formula mode divides by |V| instead") {
        CHECK(connectivity({0, 1, 2, 3}, path, true) == doctest::Approx(3.0 / 4.0));
    }
}

TEST_CASE("degree variance examples") {
    Graph tri = make_graph(0, 3, {{0, 1}, {1, 2}, {0, 2}}, 0);
    CHECK(ndv(tri) == 0.0);
    Graph path3 = make_graph(0, 3, {{0, 1}, {1, 2}}, 0);
    CHECK(ndv(path3) == doctest::Approx(2.0 / 9.0));
    Graph star = make_graph(0, 4, {{0, 1}, {0, 2}, {0, 3}}, 0);
    CHECK(ndv(star) == doctest::Approx(0.75));
    CHECK(sndv({}, {}) == 0.0);
    CHECK(sndv({0, 1, 2}, {{0, 1}, {1, 2}}) == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("elbow and curvature examples") {
    const std::vector<double> curve{10.0, 4.0, 3.5, 3.4};
    CHECK(elbow(curve) == 0);
    CHECK(curvature(curve) == doctest::Approx(1.0));

    SUBCASE("increasing curve: least-negative drop, first index") {
        CHECK(elbow({1.0, 2.0, 3.0, 4.0}) == 0);
    }
    SUBCASE("constant curve: first index, curvature 0") {
        CHECK(elbow({2.0, 2.0, 2.0}) == 0);
        CHECK(curvature({2.0, 2.0, 2.0}) == 0.0);
    }
    SUBCASE("elbow at the minimum gives curvature 0") {
        // rising curve: least-negative drop is first, which is also the min
        CHECK(elbow({1.0, 2.0, 5.0}) == 0);
        CHECK(curvature({1.0, 2.0, 5.0}) == 0.0);
    }
    SUBCASE("short curves are errors") {
        CHECK_THROWS_AS(elbow({1.0}), EvalError);
        CHECK_THROWS_AS(curvature({1.0}), EvalError);
    }
}

TEST_CASE("distance transform examples") {
    CHECK(distance_transform(5.0, 5.0, 2.0) == 0.0);
    CHECK(distance_transform(9.0, 5.0, 2.0) == 2.0);
    CHECK(std::abs(distance_transform(1.0, 5.0, 2.0)) == 2.0);
    SUBCASE("zero stddev sentinel") {
        CHECK(distance_transform(3.0, 3.0, 0.0) == 0.0);
        CHECK(std::isinf(distance_transform(4.0, 3.0, 0.0)));
    }
    SUBCASE("translation/scale consistency of |z|") {
        Rng rng(8);
        for (int i = 0; i < 100; ++i) {
            const double v = rng.uniform(-5, 5), m = rng.uniform(-5, 5), s = rng.uniform(0.1, 3);
            const double a = rng.uniform(0.1, 4), b = rng.uniform(-2, 2);
            const double z1 = std::abs(distance_transform(v, m, s));
            const double z2 = std::abs(distance_transform(a * v + b, a * m + b, a * s));
            CHECK(z1 == doctest::Approx(z2).epsilon(1e-12));
        }
    }
}

TEST_CASE("metrics match brute-force oracles on random instances") {
    Rng rng(99);
    int instances = 0;
    for (int rep = 0; rep < 220; ++rep) {
        Graph g = make_random_graph(3 + static_cast<int>(rng.uniform_int(10)),
                                    rng.uniform(0.2, 0.8), 10, rng);
        const auto nodes = random_subset(g.num_nodes, rng);
        std::vector<std::pair<int, int>> sub_edges;
        for (const auto& e : g.edges) {
            if (std::find(nodes.begin(), nodes.end(), e.first) != nodes.end() &&
                std::find(nodes.begin(), nodes.end(), e.second) != nodes.end() &&
                rng.bernoulli(0.7))
                sub_edges.push_back(e);
        }
        const auto curve = random_curve(5 + static_cast<int>(rng.uniform_int(40)), rng);

        if (nodes.size() >= 2)
            CHECK(connectivity(nodes, g) == doctest::Approx(oracle::connectivity(nodes, g)).epsilon(1e-12));
        CHECK(ndv(g) == doctest::Approx(oracle::ndv(g)).epsilon(1e-12));
        CHECK(sndv(nodes, sub_edges) == doctest::Approx(oracle::sndv(nodes, sub_edges)).epsilon(1e-12));
        CHECK(elbow(curve) == oracle::elbow(curve));
        CHECK(curvature(curve) == doctest::Approx(oracle::curvature(curve)).epsilon(1e-12));

        const double value = rng.uniform(-3, 3), mean = rng.uniform(-3, 3), sd = rng.uniform(0, 2);
        CHECK(distance_transform(value, mean, sd) ==
              doctest::Approx(oracle::distance(value, mean, sd)).epsilon(1e-12));
        ++instances;
    }
    CHECK(instances >= 200);

    SUBCASE("elbow tie-break stays first on permuted constant curves") {
        for (int len = 2; len < 8; ++len) {
            std::vector<double> flat(static_cast<std::size_t>(len), 1.25);
            CHECK(elbow(flat) == 0);
        }
    }
}

TEST_CASE("metric vector composes the standalone operations") {
    Rng rng(5);
    Graph g = make_random_graph(9, 0.4, 10, rng);
    g.id = 17;

    Explanation e;
    e.graph_id = 17;
    e.explained_label = 1;
    e.p_full = {0.2, 0.8};
    e.p_sub = {0.35, 0.65};
    e.p_comp = {0.6, 0.4};
    e.subgraph_nodes = {0, 2, 3};
    e.subgraph_edges.clear();
    for (const auto& edge : g.edges) {
        if ((edge.first == 0 || edge.first == 2 || edge.first == 3) &&
            (edge.second == 0 || edge.second == 2 || edge.second == 3))
            e.subgraph_edges.push_back(edge);
    }
    e.loss_curve = {3.0, 1.0, 0.8, 0.75, 0.74};

    std::vector<RawMetrics> val;
    for (int i = 0; i < 6; ++i) {
        RawMetrics r;
        r.raw_elbow = i % 3;
        r.raw_curvature = 0.2 + 0.1 * i;
        val.push_back(r);
    }
    const CleanStats stats = fit_clean_stats(val);
    const MetricVector v = compute_metric_vector(g, e, stats);

    CHECK(v.prediction_confidence == prediction_confidence(e.p_full));
    const auto fid = fidelity(e.p_full, e.p_sub, e.p_comp, {0.0, 1.0});
    CHECK(v.explainability == explainability(fid.plus, fid.minus));
    CHECK(v.connectivity == connectivity(e.subgraph_nodes, g));
    CHECK(v.ndv == ndv(g));
    CHECK(v.sndv == sndv(e.subgraph_nodes, e.subgraph_edges));
    CHECK(v.raw_elbow == elbow(e.loss_curve));
    CHECK(v.raw_curvature == curvature(e.loss_curve));
    CHECK(v.elbow_distance ==
          std::abs(distance_transform(v.raw_elbow, stats.mean[5], stats.stddev[5])));
    CHECK(v.curvature_distance ==
          std::abs(distance_transform(v.raw_curvature, stats.mean[6], stats.stddev[6])));

    SUBCASE("validation graph at the distribution mean has zero distances") {
        RawMetrics at_mean;
        at_mean.raw_elbow = 1;  // mean of {0,1,2,0,1,2} is 1
        at_mean.raw_curvature = stats.mean[6];
        const MetricVector mv = finalize_metric_vector(at_mean, stats);
        CHECK(mv.elbow_distance == 0.0);
        CHECK(mv.curvature_distance == 0.0);
    }
    SUBCASE("explanation for a different graph is rejected") {
        Explanation wrong = e;
        wrong.graph_id = 3;
        CHECK_THROWS_AS(compute_metric_vector(g, wrong, stats), EvalError);
    }
}

TEST_CASE("clean stats need two graphs and use population stddev") {
    std::vector<RawMetrics> one(1);
    CHECK_THROWS_AS(fit_clean_stats(one), EvalError);

    std::vector<RawMetrics> two(2);
    two[0].ndv = 1.0;
    two[1].ndv = 3.0;
    const CleanStats stats = fit_clean_stats(two);
    CHECK(stats.mean[3] == 2.0);
    CHECK(stats.stddev[3] == doctest::Approx(1.0));  // population: sqrt(((1)^2+(1)^2)/2)
}

TEST_CASE("csv row format is stable") {
    MetricVector v;
    v.graph_id = 4;
    v.prediction_confidence = 0.75;
    v.raw_elbow = 2;
    v.raw_curvature = 0.5;
    const std::string row = metric_csv_row(v, SplitKind::kValidation, false);
    CHECK(row == "4,validation,0,0.75,0,0,0,0,0,0,2,0.5");
    CHECK(metric_csv_header() ==
          "graph_id,split,is_backdoored,prediction_confidence,explainability,connectivity,ndv,"
          "sndv,elbow_distance,curvature_distance,raw_elbow,raw_curvature");
}
