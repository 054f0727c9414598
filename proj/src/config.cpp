#include "graphguard/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graphguard/splits.hpp"
#include "graphguard/synth.hpp"
#include "graphguard/tu_io.hpp"

namespace graphguard {

Dataset load_dataset(const DatasetSpec& spec) {
    if (spec.kind == "synth-bench") return make_benchmark_corpus(spec.seed);
    if (spec.kind == "json") return load_dataset_json(spec.path);
    if (spec.kind == "tu") {
        std::string root = spec.path;
        if (root.empty()) {
            const char* env = std::getenv("GRAPHGUARD_DATA_DIR");
            if (!env)
                throw ConfigError("tu dataset needs a path or GRAPHGUARD_DATA_DIR");
            root = env;
        }
        return load_tu_dataset(root, spec.name, spec.feature_mode, spec.degree_cap);
    }
    throw ConfigError("unknown dataset kind: " + spec.kind);
}

namespace {

// ---- minimal TOML reader -------------------------------------------------
// Supports: [table] and [a.b] headers, key = value with string / integer /
// float / boolean / flat array values, and # comments. Enough for the
// config surface this tool defines; anything richer should use JSON.

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

nlohmann::json parse_toml_scalar(const std::string& raw) {
    std::string v = strip(raw);
    if (v.empty()) throw ConfigError("toml: empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ConfigError("toml: unterminated string");
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.find_first_of(".eE") != std::string::npos &&
        v.find_first_not_of("+-0123456789.eE") == std::string::npos)
        return std::stod(v);
    if (v.find_first_not_of("+-0123456789_") == std::string::npos) {
        std::string digits;
        for (char c : v)
            if (c != '_') digits += c;
        return std::stoll(digits);
    }
    throw ConfigError("toml: cannot parse value: " + v);
}

nlohmann::json parse_toml_value(const std::string& raw) {
    std::string v = strip(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError("toml: unterminated array");
        nlohmann::json arr = nlohmann::json::array();
        std::string body = v.substr(1, v.size() - 2);
        std::string item;
        bool in_string = false;
        for (char c : body) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                if (!strip(item).empty()) arr.push_back(parse_toml_scalar(item));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!strip(item).empty()) arr.push_back(parse_toml_scalar(item));
        return arr;
    }
    return parse_toml_scalar(v);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

}  // namespace

nlohmann::json parse_toml_subset(const std::string& text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = strip(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("toml line " + std::to_string(line_no) + ": bad table header");
            std::string name = strip(s.substr(1, s.size() - 2));
            table = &root;
            std::size_t start = 0;
            while (start <= name.size()) {
                const auto dot = name.find('.', start);
                const std::string part =
                    name.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
                table = &(*table)[strip(part)];
                if (dot == std::string::npos) break;
                start = dot + 1;
            }
            if (table->is_null()) *table = nlohmann::json::object();
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("toml line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = strip(s.substr(0, eq));
        (*table)[key] = parse_toml_value(s.substr(eq + 1));
    }
    return root;
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".toml") return parse_toml_subset(ss.str());
    try {
        return nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
}

namespace {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

nlohmann::json sub(const nlohmann::json& j, const char* key) {
    if (j.is_object() && j.contains(key)) return j.at(key);
    return nlohmann::json::object();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;

    const auto jd = sub(j, "dataset");
    c.dataset.kind = get_or<std::string>(jd, "kind", c.dataset.kind);
    c.dataset.path = get_or<std::string>(jd, "path", c.dataset.path);
    c.dataset.name = get_or<std::string>(jd, "name", c.dataset.name);
    c.dataset.feature_mode = feature_mode_from_string(
        get_or<std::string>(jd, "feature_mode", to_string(c.dataset.feature_mode)));
    c.dataset.degree_cap = get_or<int>(jd, "degree_cap", c.dataset.degree_cap);
    c.dataset.seed = get_or<std::uint64_t>(jd, "seed", c.dataset.seed);

    const auto js = sub(j, "split");
    c.train_frac = get_or<double>(js, "train_frac", c.train_frac);
    c.val_frac = get_or<double>(js, "val_frac", c.val_frac);

    const auto ja = sub(j, "attack");
    c.attack.trigger.model =
        trigger_model_from_string(get_or<std::string>(ja, "model", "ER"));
    c.attack.trigger.size = get_or<int>(ja, "size", c.attack.trigger.size);
    c.attack.trigger.er_p = get_or<double>(ja, "er_p", c.attack.trigger.er_p);
    c.attack.trigger.sw_k = get_or<int>(ja, "sw_k", c.attack.trigger.sw_k);
    c.attack.trigger.sw_beta = get_or<double>(ja, "sw_beta", c.attack.trigger.sw_beta);
    c.attack.trigger.pa_m = get_or<int>(ja, "pa_m", c.attack.trigger.pa_m);
    c.attack.trigger.seed = get_or<std::uint64_t>(ja, "trigger_seed", c.attack.trigger.seed);
    c.attack.poison_rate = get_or<double>(ja, "poison_rate", c.attack.poison_rate);
    c.attack.target_label = get_or<int>(ja, "target_label", c.attack.target_label);
    c.attack.mode = attack_mode_from_string(
        get_or<std::string>(ja, "mode", to_string(c.attack.mode)));
    c.attack.seed = get_or<std::uint64_t>(ja, "seed", c.attack.seed);

    const auto jm = sub(j, "model");
    c.model.architecture =
        arch_from_string(get_or<std::string>(jm, "architecture", to_string(c.model.architecture)));
    c.model.hidden_dim = get_or<int>(jm, "hidden_dim", c.model.hidden_dim);
    c.model.num_layers = get_or<int>(jm, "num_layers", c.model.num_layers);
    if (jm.contains("readout"))
        c.model.readout = readout_from_string(jm.at("readout").get<std::string>());

    const auto jt = sub(j, "train");
    c.train.epochs = get_or<int>(jt, "epochs", c.train.epochs);
    c.train.learning_rate = get_or<double>(jt, "learning_rate", c.train.learning_rate);
    c.train.optimizer =
        optimizer_from_string(get_or<std::string>(jt, "optimizer", to_string(c.train.optimizer)));

    const auto je = sub(j, "explainer");
    c.explainer.epochs = get_or<int>(je, "epochs", c.explainer.epochs);
    c.explainer.learning_rate = get_or<double>(je, "learning_rate", c.explainer.learning_rate);
    c.explainer.coeff_edge_entropy =
        get_or<double>(je, "coeff_edge_entropy", c.explainer.coeff_edge_entropy);
    c.explainer.coeff_node_entropy =
        get_or<double>(je, "coeff_node_entropy", c.explainer.coeff_node_entropy);
    c.explainer.coeff_edge_size = get_or<double>(je, "coeff_edge_size", c.explainer.coeff_edge_size);
    c.explainer.coeff_node_size = get_or<double>(je, "coeff_node_size", c.explainer.coeff_node_size);
    c.explainer.subgraph_threshold =
        get_or<double>(je, "subgraph_threshold", c.explainer.subgraph_threshold);

    const auto jdet = sub(j, "detector");
    c.detector.upper_percentile = get_or<double>(jdet, "upper_percentile", c.detector.upper_percentile);
    c.detector.npmr = get_or<int>(jdet, "npmr", c.detector.npmr);

    const auto jev = sub(j, "eval_set");
    c.eval_set.clean_validation = get_or<int>(jev, "clean_validation", c.eval_set.clean_validation);
    c.eval_set.clean_train = get_or<int>(jev, "clean_train", c.eval_set.clean_train);
    c.eval_set.backdoor_train = get_or<int>(jev, "backdoor_train", c.eval_set.backdoor_train);
    c.eval_set.explain_all = get_or<bool>(jev, "explain_all", c.eval_set.explain_all);

    const auto jad = sub(j, "adaptive");
    c.adaptive.eta_gen = get_or<double>(jad, "eta_gen", c.adaptive.eta_gen);
    c.adaptive.eta_exp = get_or<double>(jad, "eta_exp", c.adaptive.eta_exp);
    c.adaptive.inner_steps = get_or<int>(jad, "inner_steps", c.adaptive.inner_steps);
    c.adaptive.epochs_per_round = get_or<int>(jad, "epochs_per_round", c.adaptive.epochs_per_round);
    c.adaptive.max_rounds = get_or<int>(jad, "max_rounds", c.adaptive.max_rounds);
    c.adaptive.convergence_tol = get_or<double>(jad, "convergence_tol", c.adaptive.convergence_tol);
    c.adaptive.trigger_size = get_or<int>(jad, "trigger_size", c.attack.trigger.size);
    const auto jsm = sub(jad, "surrogate");
    c.adaptive.surrogate_model.architecture = arch_from_string(
        get_or<std::string>(jsm, "architecture", to_string(c.adaptive.surrogate_model.architecture)));
    c.adaptive.surrogate_model.hidden_dim = get_or<int>(jsm, "hidden_dim", 32);
    c.adaptive.surrogate_model.num_layers = get_or<int>(jsm, "num_layers", 2);
    const auto jst = sub(jad, "surrogate_train");
    c.adaptive.surrogate_train.epochs = get_or<int>(jst, "epochs", 150);
    c.adaptive.surrogate_train.learning_rate = get_or<double>(jst, "learning_rate", 0.01);

    c.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", c.seeds);
    if (c.seeds.empty()) throw ConfigError("seed list must be nonempty");
    c.with_clean_baseline = get_or<bool>(j, "with_clean_baseline", c.with_clean_baseline);

    c.normalized = experiment_config_to_json(c);
    return c;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    SweepConfig s;
    s.base = experiment_config_from_json(j);
    const auto js = sub(j, "sweep");
    s.trigger_models = get_or<std::vector<std::string>>(js, "trigger_models", s.trigger_models);
    s.trigger_sizes = get_or<std::vector<int>>(js, "trigger_sizes", s.trigger_sizes);
    if (s.trigger_models.empty() || s.trigger_sizes.empty())
        throw ConfigError("sweep grid must be nonempty");
    return s;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["dataset"] = {{"kind", c.dataset.kind},
                    {"path", c.dataset.path},
                    {"name", c.dataset.name},
                    {"feature_mode", to_string(c.dataset.feature_mode)},
                    {"degree_cap", c.dataset.degree_cap},
                    {"seed", c.dataset.seed}};
    j["split"] = {{"train_frac", c.train_frac}, {"val_frac", c.val_frac}};
    j["attack"] = {{"model", to_string(c.attack.trigger.model)},
                   {"size", c.attack.trigger.size},
                   {"er_p", c.attack.trigger.er_p},
                   {"sw_k", c.attack.trigger.sw_k},
                   {"sw_beta", c.attack.trigger.sw_beta},
                   {"pa_m", c.attack.trigger.pa_m},
                   {"trigger_seed", c.attack.trigger.seed},
                   {"poison_rate", c.attack.poison_rate},
                   {"target_label", c.attack.target_label},
                   {"mode", to_string(c.attack.mode)},
                   {"seed", c.attack.seed}};
    j["model"] = {{"architecture", to_string(c.model.architecture)},
                  {"hidden_dim", c.model.hidden_dim},
                  {"num_layers", c.model.num_layers},
                  {"readout", to_string(c.model.effective_readout())}};
    j["train"] = {{"epochs", c.train.epochs},
                  {"learning_rate", c.train.learning_rate},
                  {"optimizer", to_string(c.train.optimizer)}};
    j["explainer"] = {{"epochs", c.explainer.epochs},
                      {"learning_rate", c.explainer.learning_rate},
                      {"coeff_edge_entropy", c.explainer.coeff_edge_entropy},
                      {"coeff_node_entropy", c.explainer.coeff_node_entropy},
                      {"coeff_edge_size", c.explainer.coeff_edge_size},
                      {"coeff_node_size", c.explainer.coeff_node_size},
                      {"subgraph_threshold", c.explainer.subgraph_threshold}};
    j["detector"] = {{"upper_percentile", c.detector.upper_percentile}, {"npmr", c.detector.npmr}};
    j["eval_set"] = {{"clean_validation", c.eval_set.clean_validation},
                     {"clean_train", c.eval_set.clean_train},
                     {"backdoor_train", c.eval_set.backdoor_train},
                     {"explain_all", c.eval_set.explain_all}};
    j["adaptive"] = {{"eta_gen", c.adaptive.eta_gen},
                     {"eta_exp", c.adaptive.eta_exp},
                     {"inner_steps", c.adaptive.inner_steps},
                     {"epochs_per_round", c.adaptive.epochs_per_round},
                     {"max_rounds", c.adaptive.max_rounds},
                     {"convergence_tol", c.adaptive.convergence_tol},
                     {"trigger_size", c.adaptive.trigger_size},
                     {"surrogate",
                      {{"architecture", to_string(c.adaptive.surrogate_model.architecture)},
                       {"hidden_dim", c.adaptive.surrogate_model.hidden_dim},
                       {"num_layers", c.adaptive.surrogate_model.num_layers}}},
                     {"surrogate_train",
                      {{"epochs", c.adaptive.surrogate_train.epochs},
                       {"learning_rate", c.adaptive.surrogate_train.learning_rate}}}};
    j["seeds"] = c.seeds;
    j["with_clean_baseline"] = c.with_clean_baseline;
    return j;
}

std::string config_hash(const nlohmann::json& normalized) {
    // nlohmann::json objects iterate in sorted key order, so dump() is
    // already canonical for a given content.
    const std::string text = normalized.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace graphguard
