#pragma once

#include "graphguard/common.hpp"
#include "graphguard/graph.hpp"

namespace graphguard {

// Deterministic synthetic corpora. The benchmark corpus stands in for the
// small molecule benchmarks this pipeline targets: 188 graphs, 2 classes
// (125 / 63), mean nodes 17.93 and mean edges 19.79, degree-onehot features.
// Class 1 graphs carry a high-degree hub motif; class 0 graphs keep every
// degree at 3 or below, so the task is cleanly learnable by a small GNN.
Dataset make_benchmark_corpus(std::uint64_t seed);

// Tunable variant of the above.
Dataset make_benchmark_corpus(std::uint64_t seed, int class0_count, int class1_count,
                              int total_nodes, int total_edges);

// Two-class sanity task: small cliques with pendant paths, class decided by
// clique size (triangle vs 6-clique).
Dataset make_clique_vs_triangle(int per_class, std::uint64_t seed);

// Planted-motif task for explanation checks: class 0 graphs are paths,
// class 1 graphs are paths with one chord closing a triangle. The chord is
// the unique edge (u, u+2).
Dataset make_triangle_motif(int per_class, std::uint64_t seed);

// Random connected graph with degree-onehot features, for property tests.
Graph make_random_graph(int num_nodes, double edge_prob, int degree_cap, Rng& rng);

}  // namespace graphguard
