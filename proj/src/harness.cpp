#include "graphguard/harness.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "graphguard/splits.hpp"
#include "graphguard/tu_io.hpp"

namespace graphguard {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSplitDomain = 0x73706C74u;
constexpr std::uint64_t kModelDomain = 0x6D6F646Cu;
constexpr std::uint64_t kEvalDomain = 0x6576616Cu;
constexpr std::uint64_t kExplainDomain = 0x6578706Cu;

template <class Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(std::string("stage ") + name + ": " + e.what());
    }
}

// Runs fn(i) for i in [0, n) on a small pool; results land by index, so the
// output is independent of scheduling.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers =
        std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()), 8));
    if (workers == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<int> sample_ids(std::vector<int> pool, int want, Rng& rng) {
    if (static_cast<int>(pool.size()) <= want) return pool;
    rng.shuffle(pool);
    pool.resize(static_cast<std::size_t>(want));
    std::sort(pool.begin(), pool.end());
    return pool;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << text;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                         const std::string& out_dir) {
    const auto t_start = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    RunReport report;
    report.seed = seed;
    report.config_hash = config_hash(config.normalized);

    Dataset dataset = stage("load-dataset", [&] { return load_dataset(config.dataset); });
    dataset = stage("split", [&] {
        return split_dataset(std::move(dataset), config.train_frac, config.val_frac,
                             mix_seed(seed, kSplitDomain));
    });

    ModelConfig model_config = config.model;
    model_config.seed = mix_seed(seed, kModelDomain);
    TrainConfig train_config = config.train;
    train_config.seed = mix_seed(seed, kModelDomain);

    if (config.with_clean_baseline) {
        report.baseline_clean_accuracy = stage("baseline-train", [&] {
            const auto trained = train_classifier(dataset, model_config, train_config);
            std::vector<Graph> test;
            for (int id : dataset.split_ids(SplitKind::kTest)) test.push_back(dataset.by_id(id));
            return accuracy(trained.model, test);
        });
    }

    // Attack. The trigger structure and placement seeds fold in the run seed
    // so independent seeds give independent attacks.
    AttackConfig attack = config.attack;
    attack.seed = mix_seed(attack.seed, seed);
    attack.trigger.seed = mix_seed(attack.trigger.seed, seed);

    Dataset poisoned;
    PoisonReport poison_report;
    std::vector<Graph> backdoored_test;
    if (attack.trigger.model == TriggerModel::kAdaptive) {
        AdaptiveConfig adaptive = config.adaptive;
        adaptive.seed = mix_seed(config.adaptive.seed, seed);
        adaptive.trigger_size = attack.trigger.size;
        adaptive.surrogate_model.seed = mix_seed(adaptive.seed, 0x1u);
        adaptive.surrogate_train.seed = mix_seed(adaptive.seed, 0x2u);

        // D_B is the same subset the poisoning step will hit.
        auto [gen, poisoned_pair] = stage("generator-train", [&] {
            auto ids = select_adaptive_poison_ids(dataset, attack);
            AdaptiveGenerator g = train_generator(dataset, ids, attack.target_label, adaptive);
            auto pair = poison_dataset_adaptive(dataset, g, attack);
            return std::make_pair(std::move(g), std::move(pair));
        });
        poisoned = std::move(poisoned_pair.first);
        poison_report = std::move(poisoned_pair.second);
        backdoored_test = stage("backdoor-test", [&] {
            return make_backdoored_test_adaptive(poisoned, gen, attack);
        });
        save_generator_json((fs::path(out_dir) / "generator.json").string(), gen);
    } else {
        auto pair = stage("poison", [&] { return poison_dataset(dataset, attack); });
        poisoned = std::move(pair.first);
        poison_report = std::move(pair.second);
        backdoored_test =
            stage("backdoor-test", [&] { return make_backdoored_test(poisoned, attack); });
    }
    report.poisoned_count = static_cast<int>(poison_report.poisoned_ids.size());

    const TrainedModel trained = stage("train", [&] {
        return train_classifier(poisoned, model_config, train_config);
    });
    report.model_path = (fs::path(out_dir) / "model.json").string();
    save_model_json(report.model_path, trained.model, train_config);

    stage("evaluate-attack", [&] {
        std::vector<Graph> test;
        for (int id : poisoned.split_ids(SplitKind::kTest)) test.push_back(poisoned.by_id(id));
        report.clean_test_accuracy = accuracy(trained.model, test);
        report.asr = attack_success_rate(trained.model, backdoored_test, attack.target_label);
        poison_report.asr = report.asr;
        return 0;
    });
    report.poison_report_path = (fs::path(out_dir) / "poison_report.json").string();
    write_text(report.poison_report_path, poison_report_to_json(poison_report) + "\n");

    // Evaluation sets: clean validation for thresholds, clean-train plus
    // backdoored-train for detection.
    Rng eval_rng(mix_seed(seed, kEvalDomain));
    const std::set<int> poisoned_ids(poison_report.poisoned_ids.begin(),
                                     poison_report.poisoned_ids.end());
    std::vector<int> val_ids = poisoned.split_ids(SplitKind::kValidation);
    std::vector<int> clean_train_ids;
    std::vector<int> backdoor_train_ids;
    for (int id : poisoned.split_ids(SplitKind::kTrain)) {
        if (poisoned_ids.count(id)) backdoor_train_ids.push_back(id);
        else clean_train_ids.push_back(id);
    }
    if (!config.eval_set.explain_all) {
        val_ids = sample_ids(std::move(val_ids), config.eval_set.clean_validation, eval_rng);
        clean_train_ids = sample_ids(std::move(clean_train_ids), config.eval_set.clean_train, eval_rng);
        backdoor_train_ids =
            sample_ids(std::move(backdoor_train_ids), config.eval_set.backdoor_train, eval_rng);
    }
    report.validation_explained = static_cast<int>(val_ids.size());
    report.eval_clean = static_cast<int>(clean_train_ids.size());
    report.eval_backdoor = static_cast<int>(backdoor_train_ids.size());

    std::vector<int> explain_ids = val_ids;
    explain_ids.insert(explain_ids.end(), clean_train_ids.begin(), clean_train_ids.end());
    explain_ids.insert(explain_ids.end(), backdoor_train_ids.begin(), backdoor_train_ids.end());

    std::vector<Explanation> explanations(explain_ids.size());
    stage("explain", [&] {
        parallel_for(static_cast<int>(explain_ids.size()), [&](int i) {
            const Graph& g = poisoned.by_id(explain_ids[static_cast<std::size_t>(i)]);
            ExplainerConfig ec = config.explainer;
            ec.seed = mix_seed(mix_seed(seed, kExplainDomain), static_cast<std::uint64_t>(g.id));
            explanations[static_cast<std::size_t>(i)] = explain(trained.model, g, ec);
        });
        return 0;
    });

    const auto vectors = stage("metrics", [&] {
        std::vector<RawMetrics> val_raw;
        for (std::size_t i = 0; i < val_ids.size(); ++i)
            val_raw.push_back(
                compute_raw_metrics(poisoned.by_id(explain_ids[i]), explanations[i]));
        const CleanStats stats = fit_clean_stats(val_raw);
        std::vector<MetricVector> all;
        for (std::size_t i = 0; i < explain_ids.size(); ++i)
            all.push_back(compute_metric_vector(poisoned.by_id(explain_ids[i]), explanations[i],
                                                stats));
        return all;
    });

    std::vector<MetricVector> val_vectors(vectors.begin(),
                                          vectors.begin() + static_cast<long>(val_ids.size()));
    std::vector<MetricVector> eval_vectors(vectors.begin() + static_cast<long>(val_ids.size()),
                                           vectors.end());
    std::vector<bool> eval_flags;
    for (int id : clean_train_ids) {
        (void)id;
        eval_flags.push_back(false);
    }
    for (int id : backdoor_train_ids) {
        (void)id;
        eval_flags.push_back(true);
    }

    const auto profile = stage("thresholds", [&] {
        return fit_thresholds(val_vectors, config.detector.upper_percentile,
                              poisoned.name + "-validation");
    });
    write_text((fs::path(out_dir) / "threshold_profile.json").string(),
               threshold_profile_to_json(profile) + "\n");

    stage("detect", [&] {
        std::vector<int> votes;
        for (const auto& v : eval_vectors) votes.push_back(vote(v, profile));
        report.detection = evaluate(votes, eval_flags);
        return 0;
    });

    report.percentile_rows = stage("percentile-sweep", [&] {
        std::vector<double> percentiles;
        for (double p = 50.0; p <= 100.0; p += 5.0) percentiles.push_back(p);
        return percentile_sweep(val_vectors, eval_vectors, eval_flags, percentiles);
    });

    // Artifacts.
    stage("write-reports", [&] {
        std::ostringstream metrics_csv;
        metrics_csv << metric_csv_header() << "\n";
        for (std::size_t i = 0; i < explain_ids.size(); ++i) {
            const Graph& g = poisoned.by_id(explain_ids[i]);
            const SplitKind split =
                i < val_ids.size() ? SplitKind::kValidation : SplitKind::kTrain;
            metrics_csv << metric_csv_row(vectors[i], split, g.is_backdoored) << "\n";
        }
        report.metrics_csv_path = (fs::path(out_dir) / "metrics.csv").string();
        write_text(report.metrics_csv_path, metrics_csv.str());

        std::ostringstream votes_csv;
        votes_csv << "graph_id,is_backdoored,positives";
        for (const char* name : kMetricNames) votes_csv << ",vote_" << name;
        votes_csv << "\n";
        for (std::size_t i = 0; i < eval_vectors.size(); ++i) {
            const auto mv = metric_votes(eval_vectors[i], profile);
            votes_csv << eval_vectors[i].graph_id << "," << (eval_flags[i] ? 1 : 0) << ","
                      << report.detection.votes[i];
            for (bool b : mv) votes_csv << "," << (b ? 1 : 0);
            votes_csv << "\n";
        }
        report.votes_csv_path = (fs::path(out_dir) / "votes.csv").string();
        write_text(report.votes_csv_path, votes_csv.str());

        report.detection_report_path = (fs::path(out_dir) / "detection_report.json").string();
        write_text(report.detection_report_path, detection_report_to_json(report.detection) + "\n");

        std::ostringstream psweep;
        psweep << "upper_percentile,best_npmr";
        for (int k = 1; k <= kNumMetrics; ++k) psweep << ",f1_npmr" << k;
        psweep << "\n";
        for (const auto& row : report.percentile_rows) {
            psweep << format_double(row.upper_percentile) << "," << row.best_npmr;
            for (double f : row.f1) psweep << "," << format_double(f);
            psweep << "\n";
        }
        report.percentile_sweep_path = (fs::path(out_dir) / "percentile_sweep.csv").string();
        write_text(report.percentile_sweep_path, psweep.str());
        return 0;
    });

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    save_run_report_json((fs::path(out_dir) / "run_report.json").string(), report);
    return report;
}

void save_run_report_json(const std::string& path, const RunReport& report) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["config_hash"] = report.config_hash;
    j["asr"] = report.asr;
    j["clean_test_accuracy"] = report.clean_test_accuracy;
    if (report.baseline_clean_accuracy >= 0.0)
        j["baseline_clean_accuracy"] = report.baseline_clean_accuracy;
    j["poisoned_count"] = report.poisoned_count;
    j["validation_explained"] = report.validation_explained;
    j["eval_clean"] = report.eval_clean;
    j["eval_backdoor"] = report.eval_backdoor;
    nlohmann::json per_npmr = nlohmann::json::array();
    for (const auto& s : report.detection.per_npmr)
        per_npmr.push_back({{"npmr", s.npmr}, {"f1", s.f1}, {"tpr", s.tpr}, {"fpr", s.fpr}});
    j["detection"] = {{"per_npmr", per_npmr}, {"best_npmr", report.detection.best_npmr}};
    j["files"] = {{"metrics_csv", report.metrics_csv_path},
                  {"votes_csv", report.votes_csv_path},
                  {"detection_report", report.detection_report_path},
                  {"percentile_sweep", report.percentile_sweep_path},
                  {"poison_report", report.poison_report_path},
                  {"model", report.model_path}};
    j["wall_clock_seconds"] = report.wall_clock_seconds;
    write_text(path, j.dump(2) + "\n");
}

std::vector<SweepCellResult> run_sweep(const SweepConfig& sweep, const std::string& out_root,
                                       int jobs) {
    fs::create_directories(out_root);
    struct Task {
        int config_index;
        std::string model;
        int size;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    int config_index = 0;
    for (const auto& model : sweep.trigger_models) {
        for (int size : sweep.trigger_sizes) {
            for (std::uint64_t seed : sweep.base.seeds)
                tasks.push_back({config_index, model, size, seed});
            ++config_index;
        }
    }

    std::vector<SweepCellResult> results(tasks.size());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= static_cast<int>(tasks.size())) return;
            const Task& t = tasks[static_cast<std::size_t>(i)];
            SweepCellResult& r = results[static_cast<std::size_t>(i)];
            r.config_index = t.config_index;
            r.trigger_model = t.model;
            r.trigger_size = t.size;
            r.seed = t.seed;
            ExperimentConfig config = sweep.base;
            config.attack.trigger.model = trigger_model_from_string(t.model);
            config.attack.trigger.size = t.size;
            config.adaptive.trigger_size = t.size;
            config.normalized = experiment_config_to_json(config);
            const std::string dir = (fs::path(out_root) / ("cell_" + std::to_string(t.config_index) +
                                                           "_seed_" + std::to_string(t.seed)))
                                        .string();
            try {
                r.report = run_experiment(config, t.seed, dir);
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
        }
    };
    const int workers = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Long-format results: one row per (config, seed, NPMR).
    std::ostringstream rows;
    rows << "config_index,trigger_model,trigger_size,seed,npmr,f1,tpr,fpr,asr,clean_accuracy\n";
    std::ostringstream failures;
    failures << "config_index,trigger_model,trigger_size,seed,error\n";
    int failure_count = 0;
    for (const auto& r : results) {
        if (!r.ok) {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            failures << r.config_index << "," << r.trigger_model << "," << r.trigger_size << ","
                     << r.seed << "," << msg << "\n";
            ++failure_count;
            continue;
        }
        for (const auto& s : r.report.detection.per_npmr) {
            rows << r.config_index << "," << r.trigger_model << "," << r.trigger_size << ","
                 << r.seed << "," << s.npmr << "," << format_double(s.f1) << ","
                 << format_double(s.tpr) << "," << format_double(s.fpr) << ","
                 << format_double(r.report.asr) << ","
                 << format_double(r.report.clean_test_accuracy) << "\n";
        }
    }
    write_text((fs::path(out_root) / "sweep_results.csv").string(), rows.str());
    if (failure_count > 0)
        write_text((fs::path(out_root) / "sweep_failures.csv").string(), failures.str());

    // Seed means per (config, npmr), plus plot-data files.
    std::ostringstream agg;
    agg << "config_index,trigger_model,trigger_size,npmr,mean_f1,mean_asr,seeds\n";
    std::ostringstream size_plot;
    size_plot << "trigger_model,trigger_size,npmr,mean_f1\n";
    for (int ci = 0; ci < config_index; ++ci) {
        std::vector<const SweepCellResult*> ok_runs;
        for (const auto& r : results) {
            if (r.config_index == ci && r.ok) ok_runs.push_back(&r);
        }
        if (ok_runs.empty()) continue;
        for (int npmr = 1; npmr <= kNumMetrics; ++npmr) {
            double f1 = 0.0, asr = 0.0;
            for (const auto* r : ok_runs) {
                f1 += r->report.detection.per_npmr[static_cast<std::size_t>(npmr - 1)].f1;
                asr += r->report.asr;
            }
            f1 /= static_cast<double>(ok_runs.size());
            asr /= static_cast<double>(ok_runs.size());
            agg << ci << "," << ok_runs[0]->trigger_model << "," << ok_runs[0]->trigger_size << ","
                << npmr << "," << format_double(f1) << "," << format_double(asr) << ","
                << ok_runs.size() << "\n";
            size_plot << ok_runs[0]->trigger_model << "," << ok_runs[0]->trigger_size << "," << npmr
                      << "," << format_double(f1) << "\n";
        }
    }
    write_text((fs::path(out_root) / "sweep_aggregate.csv").string(), agg.str());
    write_text((fs::path(out_root) / "trigger_size_vs_f1.csv").string(), size_plot.str());

    std::ostringstream asr_plot;
    asr_plot << "trigger_model,trigger_size,seed,asr,f1_npmr2,f1_npmr3,f1_npmr4\n";
    for (const auto& r : results) {
        if (!r.ok) continue;
        asr_plot << r.trigger_model << "," << r.trigger_size << "," << r.seed << ","
                 << format_double(r.report.asr) << ","
                 << format_double(r.report.detection.per_npmr[1].f1) << ","
                 << format_double(r.report.detection.per_npmr[2].f1) << ","
                 << format_double(r.report.detection.per_npmr[3].f1) << "\n";
    }
    write_text((fs::path(out_root) / "asr_vs_f1.csv").string(), asr_plot.str());
    return results;
}

KSetPrevalence report_k_set_prevalence(const std::vector<std::string>& votes_csv_paths) {
    if (votes_csv_paths.empty()) throw EvalError("k-set prevalence needs at least one run");
    KSetPrevalence table;
    std::array<std::array<long, kNumMetrics>, kNumMetrics> hits{};
    for (const auto& path : votes_csv_paths) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot read " + path);
        std::string line;
        if (!std::getline(in, line)) throw DataError(path + ": empty votes file");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (cells.size() != 3 + kNumMetrics)
                throw DataError(path + ": malformed votes row");
            const int k = std::stoi(cells[2]);
            if (k < 1 || k > kNumMetrics) continue;  // zero-positive rows carry no signal
            ++table.k_count[static_cast<std::size_t>(k - 1)];
            for (int j = 0; j < kNumMetrics; ++j) {
                if (cells[static_cast<std::size_t>(3 + j)] == "1")
                    ++hits[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)];
            }
        }
    }
    for (int j = 0; j < kNumMetrics; ++j) {
        for (int k = 0; k < kNumMetrics; ++k) {
            const int count = table.k_count[static_cast<std::size_t>(k)];
            table.rate[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                count > 0 ? static_cast<double>(
                                hits[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]) /
                                static_cast<double>(count)
                          : 0.0;
        }
    }
    return table;
}

void save_k_set_prevalence_csv(const std::string& path, const KSetPrevalence& table) {
    std::ostringstream out;
    out << "metric";
    for (int k = 1; k <= kNumMetrics; ++k) out << ",k" << k;
    out << "\n";
    for (int j = 0; j < kNumMetrics; ++j) {
        out << kMetricNames[static_cast<std::size_t>(j)];
        for (int k = 0; k < kNumMetrics; ++k)
            out << "," << format_double(table.rate[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
        out << "\n";
    }
    out << "graphs_with_k";
    for (int k = 0; k < kNumMetrics; ++k) out << "," << table.k_count[static_cast<std::size_t>(k)];
    out << "\n";
    write_text(path, out.str());
}

}  // namespace graphguard
