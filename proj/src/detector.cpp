#include "graphguard/detector.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace graphguard {

double percentile_linear(std::vector<double> values, double p) {
    if (values.empty()) throw EvalError("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double idx = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(idx));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = idx - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

ThresholdProfile fit_thresholds(const std::vector<MetricVector>& clean_val_vectors,
                                double upper_percentile, const std::string& fitted_on) {
    if (clean_val_vectors.size() < 4)
        throw EvalError("threshold fitting needs at least 4 clean validation vectors");
    if (upper_percentile < 50.0 || upper_percentile > 100.0)
        throw ConfigError("upper percentile must lie in [50, 100]");
    ThresholdProfile profile;
    profile.upper_percentile = upper_percentile;
    profile.fitted_on = fitted_on;
    for (int j = 0; j < kNumMetrics; ++j) {
        std::vector<double> values;
        values.reserve(clean_val_vectors.size());
        for (const auto& v : clean_val_vectors)
            values.push_back(v.seven()[static_cast<std::size_t>(j)]);
        profile.thresholds[static_cast<std::size_t>(j)] =
            percentile_linear(std::move(values), upper_percentile);
    }
    return profile;
}

std::array<bool, kNumMetrics> metric_votes(const MetricVector& vector,
                                           const ThresholdProfile& profile) {
    std::array<bool, kNumMetrics> votes{};
    const auto values = vector.seven();
    for (int j = 0; j < kNumMetrics; ++j) {
        // Strict inequality: a value exactly at its own percentile is negative.
        votes[static_cast<std::size_t>(j)] =
            values[static_cast<std::size_t>(j)] > profile.thresholds[static_cast<std::size_t>(j)];
    }
    return votes;
}

int vote(const MetricVector& vector, const ThresholdProfile& profile) {
    const auto votes = metric_votes(vector, profile);
    return static_cast<int>(std::count(votes.begin(), votes.end(), true));
}

bool composite_decision(int positive_count, int npmr) {
    if (npmr < 1 || npmr > kNumMetrics) throw ConfigError("npmr must lie in [1,7]");
    return positive_count >= npmr;
}

DetectionReport evaluate(const std::vector<int>& votes, const std::vector<bool>& ground_truth) {
    if (votes.size() != ground_truth.size())
        throw EvalError("evaluate: votes and ground truth differ in length");
    const auto backdoored = static_cast<int>(
        std::count(ground_truth.begin(), ground_truth.end(), true));
    if (backdoored == 0) throw EvalError("evaluate: no backdoored inputs, F1 undefined");
    if (backdoored == static_cast<int>(ground_truth.size()))
        throw EvalError("evaluate: no clean inputs");

    DetectionReport report;
    report.votes = votes;
    for (int npmr = 1; npmr <= kNumMetrics; ++npmr) {
        NpmrStats s;
        s.npmr = npmr;
        for (std::size_t i = 0; i < votes.size(); ++i) {
            const bool flagged = composite_decision(votes[i], npmr);
            if (flagged && ground_truth[i]) ++s.tp;
            else if (flagged && !ground_truth[i]) ++s.fp;
            else if (!flagged && ground_truth[i]) ++s.fn;
            else ++s.tn;
        }
        const double denom = 2.0 * s.tp + s.fp + s.fn;
        s.f1 = denom > 0.0 ? 2.0 * s.tp / denom : 0.0;
        s.accuracy = static_cast<double>(s.tp + s.tn) / static_cast<double>(votes.size());
        s.tpr = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
        s.fpr = static_cast<double>(s.fp) / static_cast<double>(s.fp + s.tn);
        report.per_npmr[static_cast<std::size_t>(npmr - 1)] = s;
    }
    report.best_npmr = 1;
    for (int npmr = 2; npmr <= kNumMetrics; ++npmr) {
        if (report.per_npmr[static_cast<std::size_t>(npmr - 1)].f1 >
            report.per_npmr[static_cast<std::size_t>(report.best_npmr - 1)].f1)
            report.best_npmr = npmr;
    }
    return report;
}

std::array<double, kNumMetrics> npmr_sweep(const std::vector<MetricVector>& vectors,
                                           const ThresholdProfile& profile,
                                           const std::vector<bool>& ground_truth) {
    std::vector<int> votes;
    votes.reserve(vectors.size());
    for (const auto& v : vectors) votes.push_back(vote(v, profile));
    const auto report = evaluate(votes, ground_truth);
    std::array<double, kNumMetrics> f1{};
    for (int i = 0; i < kNumMetrics; ++i)
        f1[static_cast<std::size_t>(i)] = report.per_npmr[static_cast<std::size_t>(i)].f1;
    return f1;
}

std::vector<PercentileSweepRow> percentile_sweep(
    const std::vector<MetricVector>& clean_val_vectors,
    const std::vector<MetricVector>& eval_vectors, const std::vector<bool>& ground_truth,
    const std::vector<double>& upper_percentiles) {
    std::vector<PercentileSweepRow> rows;
    for (double p : upper_percentiles) {
        const auto profile = fit_thresholds(clean_val_vectors, p);
        std::vector<int> votes;
        votes.reserve(eval_vectors.size());
        for (const auto& v : eval_vectors) votes.push_back(vote(v, profile));
        const auto report = evaluate(votes, ground_truth);
        PercentileSweepRow row;
        row.upper_percentile = p;
        row.best_npmr = report.best_npmr;
        for (int i = 0; i < kNumMetrics; ++i)
            row.f1[static_cast<std::size_t>(i)] = report.per_npmr[static_cast<std::size_t>(i)].f1;
        rows.push_back(row);
    }
    return rows;
}

std::string detection_report_to_json(const DetectionReport& report) {
    nlohmann::json j;
    j["votes"] = report.votes;
    nlohmann::json per_npmr = nlohmann::json::array();
    for (const auto& s : report.per_npmr) {
        per_npmr.push_back({{"npmr", s.npmr},
                            {"tp", s.tp},
                            {"fp", s.fp},
                            {"tn", s.tn},
                            {"fn", s.fn},
                            {"f1", s.f1},
                            {"accuracy", s.accuracy},
                            {"tpr", s.tpr},
                            {"fpr", s.fpr}});
    }
    j["per_npmr"] = std::move(per_npmr);
    j["best_npmr"] = report.best_npmr;
    return j.dump(2);
}

std::string threshold_profile_to_json(const ThresholdProfile& profile) {
    nlohmann::json j;
    nlohmann::json thresholds;
    for (int i = 0; i < kNumMetrics; ++i)
        thresholds[kMetricNames[static_cast<std::size_t>(i)]] =
            profile.thresholds[static_cast<std::size_t>(i)];
    j["thresholds"] = std::move(thresholds);
    j["direction"] = "higher-is-backdoor";
    j["upper_percentile"] = profile.upper_percentile;
    j["lower_percentile"] = 100.0 - profile.upper_percentile;
    j["fitted_on"] = profile.fitted_on;
    return j.dump(2);
}

ThresholdProfile threshold_profile_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ThresholdProfile profile;
    for (int i = 0; i < kNumMetrics; ++i)
        profile.thresholds[static_cast<std::size_t>(i)] =
            j.at("thresholds").at(kMetricNames[static_cast<std::size_t>(i)]).get<double>();
    profile.upper_percentile = j.at("upper_percentile").get<double>();
    profile.fitted_on = j.at("fitted_on").get<std::string>();
    return profile;
}

}  // namespace graphguard
