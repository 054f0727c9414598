#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "graphguard/detector.hpp"

using namespace graphguard;

namespace {

// Metric vector with every entry set to the same value.
MetricVector uniform_vector(double v, int id = 0) {
    MetricVector m;
    m.graph_id = id;
    m.prediction_confidence = v;
    m.explainability = v;
    m.connectivity = v;
    m.ndv = v;
    m.sndv = v;
    m.elbow_distance = v;
    m.curvature_distance = v;
    return m;
}

std::vector<MetricVector> ramp_vectors(int n) {
    std::vector<MetricVector> out;
    for (int i = 1; i <= n; ++i) out.push_back(uniform_vector(static_cast<double>(i), i));
    return out;
}

// Independent confusion-matrix recount.
struct Confusion {
    int tp = 0, fp = 0, tn = 0, fn = 0;
};
Confusion recount(const std::vector<int>& votes, const std::vector<bool>& truth, int npmr) {
    Confusion c;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const bool flagged = votes[i] >= npmr;
        if (flagged && truth[i]) ++c.tp;
        if (flagged && !truth[i]) ++c.fp;
        if (!flagged && truth[i]) ++c.fn;
        if (!flagged && !truth[i]) ++c.tn;
    }
    return c;
}

}  // namespace

TEST_CASE("percentile fitting") {
    SUBCASE("values 1..100 at upper 75 interpolate to 75.25") {
        const auto vectors = ramp_vectors(100);
        const auto profile = fit_thresholds(vectors, 75.0);
        for (double t : profile.thresholds) CHECK(t == doctest::Approx(75.25).epsilon(1e-12));
    }
    SUBCASE("upper 100 is the maximum") {
        const auto profile = fit_thresholds(ramp_vectors(10), 100.0);
        for (double t : profile.thresholds) CHECK(t == 10.0);
    }
    SUBCASE("constant validation values give that constant") {
        std::vector<MetricVector> flat(6, uniform_vector(4.2));
        const auto profile = fit_thresholds(flat, 80.0);
        for (double t : profile.thresholds) CHECK(t == 4.2);
    }
    SUBCASE("fewer than 4 vectors is a fitting error") {
        CHECK_THROWS_AS(fit_thresholds(ramp_vectors(3), 75.0), EvalError);
    }
    SUBCASE("percentile must lie in [50, 100]") {
        CHECK_THROWS_AS(fit_thresholds(ramp_vectors(10), 25.0), ConfigError);
        CHECK_THROWS_AS(fit_thresholds(ramp_vectors(10), 101.0), ConfigError);
        CHECK_NOTHROW(fit_thresholds(ramp_vectors(10), 50.0));
    }
}

TEST_CASE("votes") {
    const auto profile = fit_thresholds(ramp_vectors(99), 75.0);  // thresholds 74.5
    SUBCASE("values at the validation median cast no positive votes") {
        CHECK(vote(uniform_vector(50.0), profile) == 0);
    }
    SUBCASE("infinite sentinel trips all seven") {
        CHECK(vote(uniform_vector(std::numeric_limits<double>::infinity()), profile) == 7);
    }
    SUBCASE("exactly the connectivity and ndv entries above threshold count 2") {
        MetricVector v = uniform_vector(10.0);
        v.connectivity = 90.0;
        v.ndv = 80.0;
        CHECK(vote(v, profile) == 2);
        const auto mv = metric_votes(v, profile);
        CHECK(mv[2]);
        CHECK(mv[3]);
        CHECK_FALSE(mv[0]);
    }
    SUBCASE("ties at the threshold are negative votes") {
        const auto flat_profile = fit_thresholds(std::vector<MetricVector>(5, uniform_vector(3.0)), 75.0);
        CHECK(vote(uniform_vector(3.0), flat_profile) == 0);
        CHECK(vote(uniform_vector(3.0 + 1e-12), flat_profile) == 7);
    }
}

TEST_CASE("composite decision") {
    CHECK(composite_decision(7, 7));
    CHECK_FALSE(composite_decision(1, 2));
    CHECK(composite_decision(3, 3));
    CHECK_THROWS_AS(composite_decision(3, 0), ConfigError);
    CHECK_THROWS_AS(composite_decision(3, 8), ConfigError);
}

TEST_CASE("evaluate") {
    SUBCASE("all decisions correct gives F1 1.0") {
        const std::vector<int> votes{7, 7, 0, 0};
        const std::vector<bool> truth{true, true, false, false};
        const auto report = evaluate(votes, truth);
        for (const auto& s : report.per_npmr) CHECK(s.f1 == 1.0);
    }
    SUBCASE("TP=9 FP=1 FN=1 gives F1 0.9") {
        // 10 backdoored: 9 flagged (k=3), 1 missed; 1 clean flagged; 9 clean clear.
        std::vector<int> votes;
        std::vector<bool> truth;
        for (int i = 0; i < 9; ++i) {
            votes.push_back(3);
            truth.push_back(true);
        }
        votes.push_back(0);
        truth.push_back(true);
        votes.push_back(3);
        truth.push_back(false);
        for (int i = 0; i < 9; ++i) {
            votes.push_back(0);
            truth.push_back(false);
        }
        const auto report = evaluate(votes, truth);
        const auto& s = report.per_npmr[2];  // npmr 3
        CHECK(s.tp == 9);
        CHECK(s.fp == 1);
        CHECK(s.fn == 1);
        CHECK(s.f1 == doctest::Approx(0.9));
    }
    SUBCASE("no backdoored inputs is an error") {
        CHECK_THROWS_AS(evaluate({1, 2}, {false, false}), EvalError);
        CHECK_THROWS_AS(evaluate({1, 2}, {true, true}), EvalError);
    }
    SUBCASE("matches a brute-force confusion recount on random inputs") {
        Rng rng(14);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<int> votes;
            std::vector<bool> truth;
            const int n = 10 + static_cast<int>(rng.uniform_int(40));
            bool any_pos = false, any_neg = false;
            for (int i = 0; i < n; ++i) {
                votes.push_back(static_cast<int>(rng.uniform_int(8)));
                const bool t = rng.bernoulli(0.4);
                truth.push_back(t);
                (t ? any_pos : any_neg) = true;
            }
            if (!any_pos || !any_neg) continue;
            const auto report = evaluate(votes, truth);
            for (int npmr = 1; npmr <= 7; ++npmr) {
                const auto c = recount(votes, truth, npmr);
                const auto& s = report.per_npmr[static_cast<std::size_t>(npmr - 1)];
                CHECK(s.tp == c.tp);
                CHECK(s.fp == c.fp);
                CHECK(s.tn == c.tn);
                CHECK(s.fn == c.fn);
                const double denom = 2.0 * c.tp + c.fp + c.fn;
                CHECK(s.f1 == doctest::Approx(denom > 0 ? 2.0 * c.tp / denom : 0.0).epsilon(1e-12));
            }
        }
    }
    SUBCASE("TPR and FPR are monotone non-increasing in NPMR") {
        Rng rng(15);
        for (int rep = 0; rep < 30; ++rep) {
            std::vector<int> votes;
            std::vector<bool> truth;
            for (int i = 0; i < 30; ++i) {
                votes.push_back(static_cast<int>(rng.uniform_int(8)));
                truth.push_back(i % 3 == 0);
            }
            const auto report = evaluate(votes, truth);
            for (int k = 1; k < 7; ++k) {
                CHECK(report.per_npmr[static_cast<std::size_t>(k)].tpr <=
                      report.per_npmr[static_cast<std::size_t>(k - 1)].tpr);
                CHECK(report.per_npmr[static_cast<std::size_t>(k)].fpr <=
                      report.per_npmr[static_cast<std::size_t>(k - 1)].fpr);
            }
        }
    }
    SUBCASE("best npmr ties break toward the smaller value") {
        // backdoor votes 4, clean votes 1: F1=1 for npmr 2..4
        std::vector<int> votes{4, 4, 4, 1, 1, 1};
        std::vector<bool> truth{true, true, true, false, false, false};
        const auto report = evaluate(votes, truth);
        CHECK(report.per_npmr[1].f1 == 1.0);
        CHECK(report.per_npmr[2].f1 == 1.0);
        CHECK(report.per_npmr[3].f1 == 1.0);
        CHECK(report.best_npmr == 2);
    }
}

TEST_CASE("npmr sweep on a constructed fixture") {
    // all backdoor k=4, all clean k=1: F1 = 1.0 exactly for npmr in {2,3,4}
    std::vector<MetricVector> clean_val = ramp_vectors(20);
    const auto profile = fit_thresholds(clean_val, 75.0);  // thresholds 15.25

    std::vector<MetricVector> eval_vectors;
    std::vector<bool> flags;
    for (int i = 0; i < 6; ++i) {
        MetricVector v = uniform_vector(1.0);
        if (i < 3) {  // backdoor: 4 metrics above threshold
            v.prediction_confidence = 99;
            v.connectivity = 99;
            v.ndv = 99;
            v.sndv = 99;
        } else {  // clean: one stray positive
            v.explainability = 99;
        }
        eval_vectors.push_back(v);
        flags.push_back(i < 3);
    }
    const auto f1 = npmr_sweep(eval_vectors, profile, flags);
    CHECK(f1[0] < 1.0);
    CHECK(f1[1] == 1.0);
    CHECK(f1[2] == 1.0);
    CHECK(f1[3] == 1.0);
    CHECK(f1[4] == 0.0);
}

TEST_CASE("percentile sweep properties") {
    Rng rng(23);
    std::vector<MetricVector> clean_val;
    for (int i = 0; i < 40; ++i) {
        MetricVector v = uniform_vector(rng.normal(0.0, 1.0), i);
        clean_val.push_back(v);
    }
    std::vector<MetricVector> eval_vectors;
    std::vector<bool> flags;
    for (int i = 0; i < 30; ++i) {
        const bool backdoor = i < 15;
        MetricVector v = uniform_vector(rng.normal(backdoor ? 2.0 : 0.0, 1.0), 100 + i);
        eval_vectors.push_back(v);
        flags.push_back(backdoor);
    }

    const std::vector<double> percentiles{50, 55, 60, 65, 70, 75, 80, 85, 90, 95, 100};
    const auto rows = percentile_sweep(clean_val, eval_vectors, flags, percentiles);
    REQUIRE(rows.size() == percentiles.size());

    SUBCASE("raising the percentile never raises a per-metric positive count") {
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto lo = fit_thresholds(clean_val, rows[r - 1].upper_percentile);
            const auto hi = fit_thresholds(clean_val, rows[r].upper_percentile);
            for (const auto& v : eval_vectors) {
                const auto votes_lo = metric_votes(v, lo);
                const auto votes_hi = metric_votes(v, hi);
                for (int j = 0; j < kNumMetrics; ++j) {
                    if (votes_hi[static_cast<std::size_t>(j)])
                        CHECK(votes_lo[static_cast<std::size_t>(j)]);
                }
            }
        }
    }
    SUBCASE("fit_thresholds marks a bounded share of validation positive") {
        for (double p : percentiles) {
            const auto profile = fit_thresholds(clean_val, p);
            const int budget = static_cast<int>(std::ceil((100.0 - p) / 100.0 *
                                                          static_cast<double>(clean_val.size()))) +
                               1;
            for (int j = 0; j < kNumMetrics; ++j) {
                int positive = 0;
                for (const auto& v : clean_val) {
                    if (v.seven()[static_cast<std::size_t>(j)] >
                        profile.thresholds[static_cast<std::size_t>(j)])
                        ++positive;
                }
                CHECK(positive <= budget);
            }
        }
    }
}

TEST_CASE("profile serialization round-trips") {
    const auto profile = fit_thresholds(ramp_vectors(12), 85.0, "unit-val");
    const auto back = threshold_profile_from_json(threshold_profile_to_json(profile));
    CHECK(back.thresholds == profile.thresholds);
    CHECK(back.upper_percentile == profile.upper_percentile);
    CHECK(back.fitted_on == "unit-val");
}
