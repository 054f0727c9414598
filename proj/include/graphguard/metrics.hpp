#pragma once

#include <array>

#include "graphguard/explainer.hpp"
#include "graphguard/graph.hpp"

namespace graphguard {

// Canonical metric order used everywhere (vectors, thresholds, CSV columns).
inline constexpr int kNumMetrics = 7;
inline constexpr std::array<const char*, kNumMetrics> kMetricNames = {
    "prediction_confidence", "explainability", "connectivity", "ndv",
    "sndv",                  "elbow_distance", "curvature_distance"};

// The seven detection values for one graph. Elbow and curvature are carried
// in distance form (absolute z against the clean validation distribution);
// the raw loss-curve readings ride along for audit.
struct MetricVector {
    int graph_id = 0;
    double prediction_confidence = 0.0;
    double explainability = 0.0;
    double connectivity = 0.0;
    double ndv = 0.0;
    double sndv = 0.0;
    double elbow_distance = 0.0;
    double curvature_distance = 0.0;
    int raw_elbow = 0;
    double raw_curvature = 0.0;

    std::array<double, kNumMetrics> seven() const {
        return {prediction_confidence, explainability, connectivity, ndv,
                sndv,                  elbow_distance, curvature_distance};
    }
};

// Raw (untransformed) per-graph readings, before the clean-validation
// distance transform is available.
struct RawMetrics {
    int graph_id = 0;
    double prediction_confidence = 0.0;
    double explainability = 0.0;
    double connectivity = 0.0;
    double ndv = 0.0;
    double sndv = 0.0;
    int raw_elbow = 0;
    double raw_curvature = 0.0;
};

// Mean / population standard deviation of each raw reading over the clean
// validation graphs (elbow and curvature enter in raw form).
struct CleanStats {
    std::array<double, kNumMetrics> mean{};
    std::array<double, kNumMetrics> stddev{};
    int count = 0;
};

double prediction_confidence(const std::vector<double>& p_full);

// fid+ = |d(p_full,y) - d(p_comp,y)|, fid- = |d(p_full,y) - d(p_sub,y)|,
// with d the Euclidean distance and y the one-hot true label.
struct Fidelity {
    double plus = 0.0;
    double minus = 0.0;
};
Fidelity fidelity(const std::vector<double>& p_full, const std::vector<double>& p_sub,
                  const std::vector<double>& p_comp, const std::vector<double>& y_onehot);

double explainability(double fid_plus, double fid_minus);

// Fraction of node pairs in the kept subgraph that are adjacent in the
// original graph. Fewer than two kept nodes counts as 0 (degenerate).
// literal_formula switches the denominator from C(|V|,2) to |V|.
double connectivity(const std::vector<int>& subgraph_nodes, const Graph& graph,
                    bool literal_formula = false);

// Population variance of the degree multiset.
double ndv(const Graph& graph);
double sndv(const std::vector<int>& subgraph_nodes,
            const std::vector<std::pair<int, int>>& subgraph_edges);

// Smallest epoch index maximizing the one-step drop L[t] - L[t+1].
int elbow(const std::vector<double>& loss_curve);

// Min-max normalized loss value at the elbow (0 when the curve is flat).
double curvature(const std::vector<double>& loss_curve);

// Signed z-score against the clean validation distribution. A zero stddev
// yields 0 at the mean and +infinity elsewhere (an always-positive vote).
double distance_transform(double value, double clean_mean, double clean_std);

RawMetrics compute_raw_metrics(const Graph& graph, const Explanation& explanation,
                               bool literal_connectivity = false);

// Requires at least 2 vectors.
CleanStats fit_clean_stats(const std::vector<RawMetrics>& clean_validation);

MetricVector finalize_metric_vector(const RawMetrics& raw, const CleanStats& stats);

MetricVector compute_metric_vector(const Graph& graph, const Explanation& explanation,
                                   const CleanStats& stats);

// CSV export: one row per graph.
std::string metric_csv_header();
std::string metric_csv_row(const MetricVector& v, SplitKind split, bool is_backdoored);

}  // namespace graphguard
