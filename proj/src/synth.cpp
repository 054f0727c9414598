#include "graphguard/synth.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace graphguard {

namespace {

constexpr int kDegreeCap = 10;
constexpr int kHubLeaves = 5;

// Random tree over nodes [0, n) where every node keeps degree <= max_degree.
std::vector<std::pair<int, int>> random_capped_tree(int n, int max_degree, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i) {
        std::vector<int> open;
        for (int j = 0; j < i; ++j) {
            if (degree[static_cast<std::size_t>(j)] < max_degree) open.push_back(j);
        }
        int j = open[static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(open.size())))];
        edges.emplace_back(j, i);
        ++degree[static_cast<std::size_t>(j)];
        ++degree[static_cast<std::size_t>(i)];
    }
    return edges;
}

struct RawGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> edge_set;
    std::vector<int> degree;
    int label = 0;
    int hub = -1;  // class-1 hub node, chords must keep away from it

    void add(int u, int v) {
        if (u > v) std::swap(u, v);
        edges.emplace_back(u, v);
        edge_set.insert({u, v});
        ++degree[static_cast<std::size_t>(u)];
        ++degree[static_cast<std::size_t>(v)];
    }
    bool has(int u, int v) const {
        if (u > v) std::swap(u, v);
        return edge_set.count({u, v}) > 0;
    }
    // Adds one chord between two non-adjacent nodes of degree < 3 (hub and
    // its leaves excluded), returns false when no candidate pair exists.
    bool add_chord(Rng& rng, int max_degree) {
        std::vector<int> open;
        int usable = hub >= 0 ? n - kHubLeaves : n;  // hub leaves are the top nodes
        for (int v = 0; v < usable; ++v) {
            if (v != hub && degree[static_cast<std::size_t>(v)] < max_degree) open.push_back(v);
        }
        if (open.size() < 2) return false;
        for (int attempt = 0; attempt < 32; ++attempt) {
            int a = open[static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(open.size())))];
            int b = open[static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(open.size())))];
            if (a == b || has(a, b)) continue;
            add(a, b);
            return true;
        }
        // Exhaustive fallback after the random attempts run dry.
        for (std::size_t i = 0; i < open.size(); ++i) {
            for (std::size_t j = i + 1; j < open.size(); ++j) {
                if (!has(open[i], open[j])) {
                    add(open[i], open[j]);
                    return true;
                }
            }
        }
        return false;
    }
    bool remove_last_chord(int tree_edges) {
        if (static_cast<int>(edges.size()) <= tree_edges) return false;
        auto e = edges.back();
        edges.pop_back();
        edge_set.erase(e);
        --degree[static_cast<std::size_t>(e.first)];
        --degree[static_cast<std::size_t>(e.second)];
        return true;
    }
};

RawGraph build_member(int n, int label, Rng& rng) {
    RawGraph g;
    g.n = n;
    g.label = label;
    g.degree.assign(static_cast<std::size_t>(n), 0);
    if (label == 0) {
        for (auto [u, v] : random_capped_tree(n, 3, rng)) g.add(u, v);
    } else {
        // Tree body plus a hub star: kHubLeaves fresh leaves hang off one
        // body node, pushing its degree to 6..8 (above any class-0 degree).
        int body = n - kHubLeaves;
        for (auto [u, v] : random_capped_tree(body, 3, rng)) g.add(u, v);
        g.hub = static_cast<int>(rng.uniform_int(body));
        for (int leaf = 0; leaf < kHubLeaves; ++leaf) g.add(g.hub, body + leaf);
    }
    return g;
}

}  // namespace

Dataset make_benchmark_corpus(std::uint64_t seed) {
    return make_benchmark_corpus(seed, 125, 63, 3371, 3721);
}

Dataset make_benchmark_corpus(std::uint64_t seed, int class0_count, int class1_count,
                              int total_nodes, int total_edges) {
    const int num_graphs = class0_count + class1_count;
    Rng rng(mix_seed(seed, 0xBEEFu));

    // Node counts: start uniform in [12, 24], then nudge entries until the
    // total matches exactly.
    std::vector<int> sizes(static_cast<std::size_t>(num_graphs));
    for (auto& s : sizes) s = 12 + static_cast<int>(rng.uniform_int(13));
    int node_sum = std::accumulate(sizes.begin(), sizes.end(), 0);
    while (node_sum != total_nodes) {
        auto& s = sizes[static_cast<std::size_t>(rng.uniform_int(num_graphs))];
        if (node_sum < total_nodes && s < 24) {
            ++s;
            ++node_sum;
        } else if (node_sum > total_nodes && s > 12) {
            --s;
            --node_sum;
        }
    }

    std::vector<RawGraph> raw;
    raw.reserve(static_cast<std::size_t>(num_graphs));
    std::vector<int> labels(static_cast<std::size_t>(num_graphs), 0);
    for (int i = class0_count; i < num_graphs; ++i) labels[static_cast<std::size_t>(i)] = 1;
    rng.shuffle(labels);
    for (int i = 0; i < num_graphs; ++i)
        raw.push_back(build_member(sizes[static_cast<std::size_t>(i)],
                                   labels[static_cast<std::size_t>(i)], rng));

    // Every member currently holds n-1 edges (tree plus star). Sprinkle
    // chords until the corpus-wide edge total matches exactly.
    int edge_sum = 0;
    for (const auto& g : raw) edge_sum += static_cast<int>(g.edges.size());
    int guard = 0;
    while (edge_sum != total_edges && guard++ < 200000) {
        auto& g = raw[static_cast<std::size_t>(rng.uniform_int(num_graphs))];
        if (edge_sum < total_edges) {
            if (g.add_chord(rng, 3)) ++edge_sum;
        } else {
            if (g.remove_last_chord(g.n - 1)) --edge_sum;
        }
    }
    if (edge_sum != total_edges)
        throw DataError("benchmark corpus: could not reach the target edge total");

    Dataset ds;
    ds.name = "synth-bench";
    ds.num_classes = 2;
    ds.feature_mode = FeatureMode::kDegreeOnehot;
    ds.degree_cap = kDegreeCap;
    for (int i = 0; i < num_graphs; ++i) {
        auto& r = raw[static_cast<std::size_t>(i)];
        Graph g = make_graph(i, r.n, std::move(r.edges), r.label);
        apply_degree_features(g, kDegreeCap);
        ds.graphs.push_back(std::move(g));
    }
    ds.split_of.assign(ds.graphs.size(), SplitKind::kTrain);
    ds.validate();
    return ds;
}

Dataset make_clique_vs_triangle(int per_class, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0xC11Eu));
    Dataset ds;
    ds.name = "synth-cliques";
    ds.num_classes = 2;
    ds.feature_mode = FeatureMode::kDegreeOnehot;
    ds.degree_cap = kDegreeCap;
    int id = 0;
    for (int label = 0; label < 2; ++label) {
        const int k = label == 0 ? 3 : 6;
        for (int i = 0; i < per_class; ++i) {
            std::vector<std::pair<int, int>> edges;
            for (int u = 0; u < k; ++u) {
                for (int v = u + 1; v < k; ++v) edges.emplace_back(u, v);
            }
            int tail = static_cast<int>(rng.uniform_int(3));  // pendant path 0..2
            for (int t = 0; t < tail; ++t)
                edges.emplace_back(t == 0 ? 0 : k + t - 1, k + t);
            Graph g = make_graph(id++, k + tail, std::move(edges), label);
            apply_degree_features(g, kDegreeCap);
            ds.graphs.push_back(std::move(g));
        }
    }
    ds.split_of.assign(ds.graphs.size(), SplitKind::kTrain);
    ds.validate();
    return ds;
}

Dataset make_triangle_motif(int per_class, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x7121u));
    Dataset ds;
    ds.name = "synth-motif";
    ds.num_classes = 2;
    ds.feature_mode = FeatureMode::kDegreeOnehot;
    ds.degree_cap = kDegreeCap;
    const int n = 10;
    int id = 0;
    for (int label = 0; label < 2; ++label) {
        for (int i = 0; i < per_class; ++i) {
            std::vector<std::pair<int, int>> edges;
            for (int u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
            if (label == 1) {
                int pos = static_cast<int>(rng.uniform_int(n - 2));
                edges.emplace_back(pos, pos + 2);
            }
            Graph g = make_graph(id++, n, std::move(edges), label);
            apply_degree_features(g, kDegreeCap);
            ds.graphs.push_back(std::move(g));
        }
    }
    ds.split_of.assign(ds.graphs.size(), SplitKind::kTrain);
    ds.validate();
    return ds;
}

Graph make_random_graph(int num_nodes, double edge_prob, int degree_cap, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < num_nodes; ++u) {
        for (int v = u + 1; v < num_nodes; ++v) {
            if (rng.bernoulli(edge_prob)) edges.emplace_back(u, v);
        }
    }
    Graph g = make_graph(0, num_nodes, std::move(edges), 0);
    apply_degree_features(g, degree_cap);
    return g;
}

}  // namespace graphguard
