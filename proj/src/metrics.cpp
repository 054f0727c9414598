#include "graphguard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace graphguard {

double prediction_confidence(const std::vector<double>& p_full) {
    if (p_full.empty()) throw EvalError("prediction_confidence: empty probability vector");
    return *std::max_element(p_full.begin(), p_full.end());
}

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

double population_variance(const std::vector<int>& values) {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (int v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (int v : values) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(values.size());
}

}  // namespace

Fidelity fidelity(const std::vector<double>& p_full, const std::vector<double>& p_sub,
                  const std::vector<double>& p_comp, const std::vector<double>& y_onehot) {
    if (p_full.size() != y_onehot.size() || p_sub.size() != y_onehot.size() ||
        p_comp.size() != y_onehot.size())
        throw ShapeError("fidelity: probability vectors must share the class count");
    const double d_full = euclidean(p_full, y_onehot);
    return {std::abs(d_full - euclidean(p_comp, y_onehot)),
            std::abs(d_full - euclidean(p_sub, y_onehot))};
}

double explainability(double fid_plus, double fid_minus) { return fid_plus - fid_minus; }

double connectivity(const std::vector<int>& subgraph_nodes, const Graph& graph,
                    bool literal_formula) {
    const std::size_t k = subgraph_nodes.size();
    if (k < 2) return 0.0;  // degenerate subgraph, counted as fully disconnected
    long present = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (graph.has_edge(subgraph_nodes[i], subgraph_nodes[j])) ++present;
        }
    }
    const double denom = literal_formula
                             ? static_cast<double>(k)
                             : static_cast<double>(k) * static_cast<double>(k - 1) / 2.0;
    return static_cast<double>(present) / denom;
}

double ndv(const Graph& graph) {
    if (graph.num_nodes == 0) return 0.0;
    return population_variance(graph.degrees());
}

double sndv(const std::vector<int>& subgraph_nodes,
            const std::vector<std::pair<int, int>>& subgraph_edges) {
    if (subgraph_nodes.empty()) return 0.0;
    std::vector<int> degree(subgraph_nodes.size(), 0);
    for (const auto& [u, v] : subgraph_edges) {
        for (std::size_t i = 0; i < subgraph_nodes.size(); ++i) {
            if (subgraph_nodes[i] == u || subgraph_nodes[i] == v) ++degree[i];
        }
    }
    return population_variance(degree);
}

int elbow(const std::vector<double>& loss_curve) {
    if (loss_curve.size() < 2) throw EvalError("elbow: loss curve needs at least 2 points");
    int best = 0;
    double best_drop = loss_curve[0] - loss_curve[1];
    for (std::size_t t = 1; t + 1 < loss_curve.size(); ++t) {
        const double drop = loss_curve[t] - loss_curve[t + 1];
        if (drop > best_drop) {
            best_drop = drop;
            best = static_cast<int>(t);
        }
    }
    return best;
}

double curvature(const std::vector<double>& loss_curve) {
    const int t_e = elbow(loss_curve);
    const double lo = *std::min_element(loss_curve.begin(), loss_curve.end());
    const double hi = *std::max_element(loss_curve.begin(), loss_curve.end());
    if (hi == lo) return 0.0;
    return (loss_curve[static_cast<std::size_t>(t_e)] - lo) / (hi - lo);
}

double distance_transform(double value, double clean_mean, double clean_std) {
    if (!std::isfinite(clean_std)) throw EvalError("distance_transform: non-finite stddev");
    if (clean_std == 0.0)
        return value == clean_mean ? 0.0 : std::numeric_limits<double>::infinity();
    return (value - clean_mean) / clean_std;
}

RawMetrics compute_raw_metrics(const Graph& graph, const Explanation& explanation,
                               bool literal_connectivity) {
    if (explanation.graph_id != graph.id)
        throw EvalError("explanation does not belong to graph " + std::to_string(graph.id));
    RawMetrics m;
    m.graph_id = graph.id;
    m.prediction_confidence = prediction_confidence(explanation.p_full);
    std::vector<double> y(explanation.p_full.size(), 0.0);
    y[static_cast<std::size_t>(explanation.explained_label)] = 1.0;
    const Fidelity fid = fidelity(explanation.p_full, explanation.p_sub, explanation.p_comp, y);
    m.explainability = explainability(fid.plus, fid.minus);
    m.connectivity = connectivity(explanation.subgraph_nodes, graph, literal_connectivity);
    m.ndv = ndv(graph);
    m.sndv = sndv(explanation.subgraph_nodes, explanation.subgraph_edges);
    m.raw_elbow = elbow(explanation.loss_curve);
    m.raw_curvature = curvature(explanation.loss_curve);
    return m;
}

namespace {

std::array<double, kNumMetrics> raw_values(const RawMetrics& m) {
    return {m.prediction_confidence,
            m.explainability,
            m.connectivity,
            m.ndv,
            m.sndv,
            static_cast<double>(m.raw_elbow),
            m.raw_curvature};
}

}  // namespace

CleanStats fit_clean_stats(const std::vector<RawMetrics>& clean_validation) {
    if (clean_validation.size() < 2)
        throw EvalError("clean statistics need at least 2 validation graphs");
    CleanStats stats;
    stats.count = static_cast<int>(clean_validation.size());
    const double n = static_cast<double>(clean_validation.size());
    for (const auto& m : clean_validation) {
        const auto v = raw_values(m);
        for (int j = 0; j < kNumMetrics; ++j) stats.mean[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(j)];
    }
    for (auto& x : stats.mean) x /= n;
    for (const auto& m : clean_validation) {
        const auto v = raw_values(m);
        for (int j = 0; j < kNumMetrics; ++j) {
            const double d = v[static_cast<std::size_t>(j)] - stats.mean[static_cast<std::size_t>(j)];
            stats.stddev[static_cast<std::size_t>(j)] += d * d;
        }
    }
    for (auto& x : stats.stddev) x = std::sqrt(x / n);
    return stats;
}

MetricVector finalize_metric_vector(const RawMetrics& raw, const CleanStats& stats) {
    MetricVector v;
    v.graph_id = raw.graph_id;
    v.prediction_confidence = raw.prediction_confidence;
    v.explainability = raw.explainability;
    v.connectivity = raw.connectivity;
    v.ndv = raw.ndv;
    v.sndv = raw.sndv;
    v.raw_elbow = raw.raw_elbow;
    v.raw_curvature = raw.raw_curvature;
    v.elbow_distance =
        std::abs(distance_transform(static_cast<double>(raw.raw_elbow), stats.mean[5], stats.stddev[5]));
    v.curvature_distance =
        std::abs(distance_transform(raw.raw_curvature, stats.mean[6], stats.stddev[6]));
    return v;
}

MetricVector compute_metric_vector(const Graph& graph, const Explanation& explanation,
                                   const CleanStats& stats) {
    return finalize_metric_vector(compute_raw_metrics(graph, explanation), stats);
}

std::string metric_csv_header() {
    std::ostringstream out;
    out << "graph_id,split,is_backdoored";
    for (const char* name : kMetricNames) out << "," << name;
    out << ",raw_elbow,raw_curvature";
    return out.str();
}

std::string metric_csv_row(const MetricVector& v, SplitKind split, bool is_backdoored) {
    std::ostringstream out;
    out << v.graph_id << "," << to_string(split) << "," << (is_backdoored ? 1 : 0);
    for (double x : v.seven()) out << "," << format_double(x);
    out << "," << v.raw_elbow << "," << format_double(v.raw_curvature);
    return out.str();
}

}  // namespace graphguard
