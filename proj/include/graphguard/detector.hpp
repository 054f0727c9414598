#pragma once

#include "graphguard/metrics.hpp"

namespace graphguard {

// Per-metric decision thresholds fitted on clean validation data. Every
// metric votes in the higher-is-backdoor direction (the distance forms are
// one-sided by construction), so only the upper percentile matters; the
// lower percentile of the pair is 100 - upper.
struct ThresholdProfile {
    std::array<double, kNumMetrics> thresholds{};
    double upper_percentile = 75.0;
    std::string fitted_on;  // validation-set identifier
};

// Linear-interpolation percentile of a sample: index p/100 * (n-1) between
// the sorted order statistics.
double percentile_linear(std::vector<double> values, double p);

// Fits the per-metric thresholds at the given upper percentile. Needs at
// least 4 clean validation vectors; upper_percentile in [50, 100].
ThresholdProfile fit_thresholds(const std::vector<MetricVector>& clean_val_vectors,
                                double upper_percentile, const std::string& fitted_on = "");

// Per-metric positive votes (strictly above threshold) and their count.
std::array<bool, kNumMetrics> metric_votes(const MetricVector& vector,
                                           const ThresholdProfile& profile);
int vote(const MetricVector& vector, const ThresholdProfile& profile);

// Backdoor verdict: at least npmr of the seven metrics positive.
bool composite_decision(int positive_count, int npmr);

struct NpmrStats {
    int npmr = 0;
    int tp = 0, fp = 0, tn = 0, fn = 0;
    double f1 = 0.0, accuracy = 0.0, tpr = 0.0, fpr = 0.0;
};

struct DetectionReport {
    std::vector<int> votes;  // k_i per graph, aligned with the input order
    std::array<NpmrStats, kNumMetrics> per_npmr;
    int best_npmr = 0;  // argmax F1, ties to the smaller NPMR
};

// Confusion counts, F1, accuracy, TPR and FPR for every NPMR in 1..7.
// Requires at least one backdoored and one clean input.
DetectionReport evaluate(const std::vector<int>& votes, const std::vector<bool>& ground_truth);

// F1-per-NPMR table (the row layout of the composite results).
std::array<double, kNumMetrics> npmr_sweep(const std::vector<MetricVector>& vectors,
                                           const ThresholdProfile& profile,
                                           const std::vector<bool>& ground_truth);

struct PercentileSweepRow {
    double upper_percentile = 0.0;
    int best_npmr = 0;
    std::array<double, kNumMetrics> f1{};
};

// Refits thresholds at each upper percentile and reports the F1-optimal NPMR
// per setting. Raw metrics are refitted per percentile from the same clean
// validation vectors.
std::vector<PercentileSweepRow> percentile_sweep(
    const std::vector<MetricVector>& clean_val_vectors,
    const std::vector<MetricVector>& eval_vectors, const std::vector<bool>& ground_truth,
    const std::vector<double>& upper_percentiles);

std::string detection_report_to_json(const DetectionReport& report);
std::string threshold_profile_to_json(const ThresholdProfile& profile);
ThresholdProfile threshold_profile_from_json(const std::string& text);

}  // namespace graphguard
