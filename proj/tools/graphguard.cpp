// Command-line front end for the backdoor attack / detection workbench.
// Exit codes: 0 success, 2 configuration problem, 3 pipeline stage failure.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "graphguard/harness.hpp"
#include "graphguard/splits.hpp"
#include "graphguard/synth.hpp"
#include "graphguard/tu_io.hpp"

namespace fs = std::filesystem;
using namespace graphguard;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

ExperimentConfig load_experiment_config(const std::string& path) {
    return experiment_config_from_json(load_config_file(path));
}

Dataset load_and_split(const ExperimentConfig& config, std::uint64_t seed) {
    Dataset ds = load_dataset(config.dataset);
    return split_dataset(std::move(ds), config.train_frac, config.val_frac,
                         mix_seed(seed, 0x73706C74u));
}

void print_npmr_table(const DetectionReport& report) {
    std::cout << "npmr  f1      tpr     fpr\n";
    for (const auto& s : report.per_npmr) {
        std::printf("%4d  %.4f  %.4f  %.4f\n", s.npmr, s.f1, s.tpr, s.fpr);
    }
    std::cout << "best npmr: " << report.best_npmr << "\n";
}

int cmd_synth(const std::string& name, const std::string& out, std::uint64_t seed) {
    Dataset ds;
    if (name == "bench") ds = make_benchmark_corpus(seed);
    else if (name == "cliques") ds = make_clique_vs_triangle(24, seed);
    else if (name == "motif") ds = make_triangle_motif(24, seed);
    else throw ConfigError("unknown synthetic corpus: " + name + " (bench|cliques|motif)");
    ds.name = name == "bench" ? "synth-bench" : "synth-" + name;
    write_tu_dataset(out, ds);
    double nodes = 0, edges = 0;
    for (const auto& g : ds.graphs) {
        nodes += g.num_nodes;
        edges += g.num_edges();
    }
    std::cout << "wrote " << ds.size() << " graphs (" << ds.num_classes
              << " classes, mean nodes " << nodes / ds.size() << ", mean edges "
              << edges / ds.size() << ") to " << (fs::path(out) / ds.name).string() << "\n";
    return kExitOk;
}

int cmd_attack(const std::string& config_path, const std::string& out, std::uint64_t seed) {
    auto config = load_experiment_config(config_path);
    Dataset ds = load_and_split(config, seed);
    AttackConfig attack = config.attack;
    attack.seed = mix_seed(attack.seed, seed);
    attack.trigger.seed = mix_seed(attack.trigger.seed, seed);
    fs::create_directories(out);
    if (attack.trigger.model == TriggerModel::kAdaptive)
        throw ConfigError("use adaptive-train / adaptive-attack for the adaptive trigger");
    auto [poisoned, report] = poison_dataset(ds, attack);
    save_dataset_json((fs::path(out) / "poisoned_dataset.json").string(), poisoned);
    std::ofstream pr(fs::path(out) / "poison_report.json");
    pr << poison_report_to_json(report) << "\n";
    std::cout << "poisoned " << report.poisoned_ids.size() << " of "
              << ds.split_ids(SplitKind::kTrain).size() << " train graphs\n";
    return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& dataset_path,
              const std::string& out, std::uint64_t seed) {
    auto config = load_experiment_config(config_path);
    Dataset ds = dataset_path.empty() ? load_and_split(config, seed)
                                      : load_dataset_json(dataset_path);
    ModelConfig mc = config.model;
    mc.seed = mix_seed(seed, 0x6D6F646Cu);
    TrainConfig tc = config.train;
    tc.seed = mc.seed;
    auto trained = train_classifier(ds, mc, tc);
    fs::create_directories(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path().string());
    save_model_json(out, trained.model, tc);
    std::vector<Graph> test;
    for (int id : ds.split_ids(SplitKind::kTest)) test.push_back(ds.by_id(id));
    std::cout << "final train loss " << trained.loss_curve.back() << ", test accuracy "
              << accuracy(trained.model, test) << ", checkpoint " << out << "\n";
    return kExitOk;
}

int cmd_explain(const std::string& config_path, const std::string& dataset_path,
                const std::string& model_path, const std::string& split_name,
                const std::string& out, std::uint64_t seed) {
    auto config = load_experiment_config(config_path);
    Dataset ds = load_dataset_json(dataset_path);
    GnnModel model = load_model_json(model_path);
    fs::create_directories(out);
    const SplitKind split = split_from_string(split_name);
    int written = 0;
    for (int id : ds.split_ids(split)) {
        ExplainerConfig ec = config.explainer;
        ec.seed = mix_seed(mix_seed(seed, 0x6578706Cu), static_cast<std::uint64_t>(id));
        const auto e = explain(model, ds.by_id(id), ec);
        save_explanation_json((fs::path(out) / ("explanation_" + std::to_string(id) + ".json")).string(), e);
        ++written;
    }
    std::cout << "wrote " << written << " explanations to " << out << "\n";
    return kExitOk;
}

// Reads a metrics.csv produced by `run` and re-runs threshold fitting and
// voting at the requested operating point.
int cmd_detect(const std::string& metrics_path, double percentile, int npmr,
               const std::string& out) {
    std::ifstream in(metrics_path);
    if (!in) throw DataError("cannot read " + metrics_path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty metrics csv");
    std::vector<MetricVector> val_vectors, eval_vectors;
    std::vector<bool> flags;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 12) throw DataError("malformed metrics row: " + line);
        MetricVector v;
        v.graph_id = std::stoi(cells[0]);
        v.prediction_confidence = std::stod(cells[3]);
        v.explainability = std::stod(cells[4]);
        v.connectivity = std::stod(cells[5]);
        v.ndv = std::stod(cells[6]);
        v.sndv = std::stod(cells[7]);
        v.elbow_distance = std::stod(cells[8]);
        v.curvature_distance = std::stod(cells[9]);
        v.raw_elbow = std::stoi(cells[10]);
        v.raw_curvature = std::stod(cells[11]);
        if (cells[1] == "validation") {
            val_vectors.push_back(v);
        } else {
            eval_vectors.push_back(v);
            flags.push_back(cells[2] == "1");
        }
    }
    const auto profile = fit_thresholds(val_vectors, percentile, metrics_path);
    std::vector<int> votes;
    for (const auto& v : eval_vectors) votes.push_back(vote(v, profile));
    const auto report = evaluate(votes, flags);
    fs::create_directories(out);
    std::ofstream rp(fs::path(out) / "detection_report.json");
    rp << detection_report_to_json(report) << "\n";
    std::ofstream tp(fs::path(out) / "threshold_profile.json");
    tp << threshold_profile_to_json(profile) << "\n";
    print_npmr_table(report);
    const auto& op = report.per_npmr[static_cast<std::size_t>(npmr - 1)];
    std::cout << "operating point npmr=" << npmr << ": f1 " << op.f1 << ", tpr " << op.tpr
              << ", fpr " << op.fpr << "\n";
    return kExitOk;
}

int cmd_adaptive_train(const std::string& config_path, const std::string& out,
                       std::uint64_t seed) {
    auto config = load_experiment_config(config_path);
    Dataset ds = load_and_split(config, seed);
    AttackConfig attack = config.attack;
    attack.seed = mix_seed(attack.seed, seed);
    attack.trigger.model = TriggerModel::kAdaptive;
    AdaptiveConfig adaptive = config.adaptive;
    adaptive.seed = mix_seed(config.adaptive.seed, seed);
    adaptive.trigger_size = attack.trigger.size;
    const auto d_b = select_adaptive_poison_ids(ds, attack);
    GeneratorTrainLog log;
    AdaptiveGenerator gen = train_generator(ds, d_b, attack.target_label, adaptive, &log);
    fs::create_directories(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path().string());
    save_generator_json(out, gen);
    std::cout << "generator trained for " << log.rounds << " rounds; round losses:";
    for (double l : log.round_loss) std::cout << " " << l;
    std::cout << "\ncheckpoint " << out << "\n";
    return kExitOk;
}

int cmd_adaptive_attack(const std::string& config_path, const std::string& generator_path,
                        const std::string& out, std::uint64_t seed) {
    auto config = load_experiment_config(config_path);
    Dataset ds = load_and_split(config, seed);
    AttackConfig attack = config.attack;
    attack.seed = mix_seed(attack.seed, seed);
    attack.trigger.model = TriggerModel::kAdaptive;
    AdaptiveGenerator gen = load_generator_json(generator_path);
    auto [poisoned, report] = poison_dataset_adaptive(ds, gen, attack);
    fs::create_directories(out);
    save_dataset_json((fs::path(out) / "poisoned_dataset.json").string(), poisoned);
    std::ofstream pr(fs::path(out) / "poison_report.json");
    pr << poison_report_to_json(report) << "\n";
    std::cout << "adaptively poisoned " << report.poisoned_ids.size() << " train graphs\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out, long long seed_override,
            int npmr_override, double percentile_override) {
    auto config = load_experiment_config(config_path);
    if (npmr_override > 0) config.detector.npmr = npmr_override;
    if (percentile_override > 0) config.detector.upper_percentile = percentile_override;
    config.normalized = experiment_config_to_json(config);
    std::vector<std::uint64_t> seeds = config.seeds;
    if (seed_override >= 0) seeds = {static_cast<std::uint64_t>(seed_override)};
    double asr = 0.0, f1_best = 0.0;
    for (std::uint64_t seed : seeds) {
        const std::string dir = (fs::path(out) / ("seed_" + std::to_string(seed))).string();
        const RunReport report = run_experiment(config, seed, dir);
        asr += report.asr / static_cast<double>(seeds.size());
        f1_best += report.detection.per_npmr[static_cast<std::size_t>(report.detection.best_npmr - 1)].f1 /
                   static_cast<double>(seeds.size());
        std::cout << "seed " << seed << ": asr " << report.asr << ", clean acc "
                  << report.clean_test_accuracy << ", best npmr "
                  << report.detection.best_npmr << "\n";
        print_npmr_table(report.detection);
    }
    std::cout << "mean asr " << asr << ", mean best-npmr f1 " << f1_best << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out, int jobs) {
    const auto sweep = sweep_config_from_json(load_config_file(config_path));
    const auto results = run_sweep(sweep, out, jobs);
    int ok = 0, failed = 0;
    for (const auto& r : results) (r.ok ? ok : failed)++;
    std::cout << ok << " runs completed, " << failed << " failed; results under " << out << "\n";
    return failed == 0 ? kExitOk : kExitStage;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& out) {
    std::vector<std::string> votes_files;
    for (const auto& root : runs) {
        if (fs::is_directory(root)) {
            for (const auto& entry : fs::recursive_directory_iterator(root)) {
                if (entry.path().filename() == "votes.csv")
                    votes_files.push_back(entry.path().string());
            }
        } else {
            votes_files.push_back(root);
        }
    }
    std::sort(votes_files.begin(), votes_files.end());
    const auto table = report_k_set_prevalence(votes_files);
    save_k_set_prevalence_csv(out, table);
    std::cout << "k-set prevalence over " << votes_files.size() << " runs written to " << out
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graphguard: graph backdoor attack and explanation-based detection workbench"};
    app.require_subcommand(1);

    std::string config_path, out = "out", dataset_path, model_path, generator_path;
    std::string metrics_path, split_name = "train", synth_name = "bench";
    std::vector<std::string> run_dirs;
    std::uint64_t seed = 1;
    long long seed_override = -1;
    double percentile = 75.0;
    int npmr = 2;
    int jobs = 2;

    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus in TUDataset form");
    synth->add_option("--name", synth_name, "bench | cliques | motif");
    synth->add_option("--out", out, "output root directory");
    synth->add_option("--seed", seed, "corpus seed");

    auto* attack = app.add_subcommand("attack", "poison the train split with a random trigger");
    attack->add_option("--config", config_path)->required();
    attack->add_option("--out", out);
    attack->add_option("--seed", seed);

    auto* train = app.add_subcommand("train", "train a classifier");
    train->add_option("--config", config_path)->required();
    train->add_option("--dataset", dataset_path, "serialized dataset JSON (default: from config)");
    train->add_option("--out", out)->required();
    train->add_option("--seed", seed);

    auto* explain_cmd = app.add_subcommand("explain", "explain one split of a dataset");
    explain_cmd->add_option("--config", config_path)->required();
    explain_cmd->add_option("--dataset", dataset_path)->required();
    explain_cmd->add_option("--model", model_path)->required();
    explain_cmd->add_option("--split", split_name, "train | validation | test");
    explain_cmd->add_option("--out", out);
    explain_cmd->add_option("--seed", seed);

    auto* detect = app.add_subcommand("detect", "threshold + vote on an emitted metrics.csv");
    detect->add_option("--metrics", metrics_path)->required();
    detect->add_option("--percentile", percentile, "upper threshold percentile");
    detect->add_option("--npmr", npmr, "operating NPMR")->check(CLI::Range(1, 7));
    detect->add_option("--out", out);

    auto* adaptive_train = app.add_subcommand("adaptive-train", "train the trigger edge generator");
    adaptive_train->add_option("--config", config_path)->required();
    adaptive_train->add_option("--out", out)->required();
    adaptive_train->add_option("--seed", seed);

    auto* adaptive_attack = app.add_subcommand("adaptive-attack", "poison with a trained generator");
    adaptive_attack->add_option("--config", config_path)->required();
    adaptive_attack->add_option("--generator", generator_path)->required();
    adaptive_attack->add_option("--out", out);
    adaptive_attack->add_option("--seed", seed);

    auto* run = app.add_subcommand("run", "full pipeline: attack, train, explain, detect, report");
    run->add_option("--config", config_path)->required();
    run->add_option("--out", out);
    run->add_option("--seed", seed_override, "override the config seed list with one seed");
    int npmr_override = -1;
    double percentile_override = -1.0;
    run->add_option("--npmr", npmr_override, "override the reported operating NPMR")
        ->check(CLI::Range(1, 7));
    run->add_option("--percentile", percentile_override, "override the upper threshold percentile");

    auto* sweep = app.add_subcommand("sweep", "grid of runs over trigger models and sizes");
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--out", out);
    sweep->add_option("--jobs", jobs, "parallel runs");

    auto* report = app.add_subcommand("report", "k-set prevalence over completed runs");
    report->add_option("--runs", run_dirs, "run directories or votes.csv files")->required();
    report->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_name, out, seed);
        if (attack->parsed()) return cmd_attack(config_path, out, seed);
        if (train->parsed()) return cmd_train(config_path, dataset_path, out, seed);
        if (explain_cmd->parsed())
            return cmd_explain(config_path, dataset_path, model_path, split_name, out, seed);
        if (detect->parsed()) return cmd_detect(metrics_path, percentile, npmr, out);
        if (adaptive_train->parsed()) return cmd_adaptive_train(config_path, out, seed);
        if (adaptive_attack->parsed())
            return cmd_adaptive_attack(config_path, generator_path, out, seed);
        if (run->parsed()) return cmd_run(config_path, out, seed_override, npmr_override, percentile_override);
        if (sweep->parsed()) return cmd_sweep(config_path, out, jobs);
        if (report->parsed()) {
            const std::string out_path =
                fs::is_directory(out) || out.find('.') == std::string::npos
                    ? (fs::path(out) / "k_set_prevalence.csv").string()
                    : out;
            fs::create_directories(fs::path(out_path).parent_path().empty()
                                       ? "."
                                       : fs::path(out_path).parent_path().string());
            return cmd_report(run_dirs, out_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
    return kExitConfig;
}
