#include "graphguard/tu_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace graphguard {

namespace {

namespace fs = std::filesystem;

std::ifstream open_or_throw(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing dataset file: " + path.string());
    return in;
}

// Parses "a, b" / "a b" / "a,b" into two ints.
bool parse_pair(const std::string& line, long& a, long& b) {
    std::string cleaned = line;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream ss(cleaned);
    return static_cast<bool>(ss >> a >> b);
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

Dataset load_tu_dataset(const std::string& root_path, const std::string& name,
                        FeatureMode mode, int degree_cap) {
    const fs::path dir = fs::path(root_path) / name;

    // Node -> graph assignment.
    std::vector<int> node_graph;  // 0-indexed graph per node
    {
        auto in = open_or_throw(dir / (name + "_graph_indicator.txt"));
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (blank(line)) continue;
            long gid = 0;
            try {
                gid = std::stol(line);
            } catch (const std::exception&) {
                throw DataError(name + "_graph_indicator.txt line " + std::to_string(line_no) +
                                ": not an integer");
            }
            if (gid < 1)
                throw DataError(name + "_graph_indicator.txt line " + std::to_string(line_no) +
                                ": graph index out of range");
            node_graph.push_back(static_cast<int>(gid - 1));
        }
    }
    const int total_nodes = static_cast<int>(node_graph.size());
    const int num_graphs = total_nodes == 0
                               ? 0
                               : *std::max_element(node_graph.begin(), node_graph.end()) + 1;

    // Per-graph local node numbering.
    std::vector<int> node_local(static_cast<std::size_t>(total_nodes));
    std::vector<int> graph_size(static_cast<std::size_t>(num_graphs), 0);
    for (int n = 0; n < total_nodes; ++n) {
        int g = node_graph[static_cast<std::size_t>(n)];
        node_local[static_cast<std::size_t>(n)] = graph_size[static_cast<std::size_t>(g)]++;
    }

    // Labels, remapped to 0..C-1 in sorted order of the raw values.
    std::vector<long> raw_labels;
    {
        auto in = open_or_throw(dir / (name + "_graph_labels.txt"));
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (blank(line)) continue;
            try {
                raw_labels.push_back(std::stol(line));
            } catch (const std::exception&) {
                throw DataError(name + "_graph_labels.txt line " + std::to_string(line_no) +
                                ": not an integer");
            }
        }
    }
    if (static_cast<int>(raw_labels.size()) != num_graphs)
        throw DataError(name + ": graph label count (" + std::to_string(raw_labels.size()) +
                        ") does not match indicated graph count (" + std::to_string(num_graphs) +
                        ")");
    std::map<long, int> label_map;
    for (long l : raw_labels) label_map.emplace(l, 0);
    int next = 0;
    for (auto& [raw, mapped] : label_map) mapped = next++;

    // Edges.
    std::vector<std::vector<std::pair<int, int>>> edges(static_cast<std::size_t>(num_graphs));
    {
        auto in = open_or_throw(dir / (name + "_A.txt"));
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (blank(line)) continue;
            long a = 0, b = 0;
            if (!parse_pair(line, a, b))
                throw DataError(name + "_A.txt line " + std::to_string(line_no) +
                                ": expected two node indices");
            if (a < 1 || b < 1 || a > total_nodes || b > total_nodes)
                throw DataError(name + "_A.txt line " + std::to_string(line_no) +
                                ": node index out of range");
            int u = static_cast<int>(a - 1);
            int v = static_cast<int>(b - 1);
            if (node_graph[static_cast<std::size_t>(u)] != node_graph[static_cast<std::size_t>(v)])
                throw DataError(name + "_A.txt line " + std::to_string(line_no) +
                                ": edge spans two graphs");
            int g = node_graph[static_cast<std::size_t>(u)];
            edges[static_cast<std::size_t>(g)].emplace_back(
                node_local[static_cast<std::size_t>(u)], node_local[static_cast<std::size_t>(v)]);
        }
    }

    // Optional node labels.
    std::vector<int> node_labels;
    int num_node_labels = 0;
    const fs::path node_label_path = dir / (name + "_node_labels.txt");
    if (fs::exists(node_label_path)) {
        auto in = open_or_throw(node_label_path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (blank(line)) continue;
            try {
                node_labels.push_back(static_cast<int>(std::stol(line)));
            } catch (const std::exception&) {
                throw DataError(name + "_node_labels.txt line " + std::to_string(line_no) +
                                ": not an integer");
            }
        }
        if (static_cast<int>(node_labels.size()) != total_nodes)
            throw DataError(name + "_node_labels.txt: node label count mismatch");
        if (!node_labels.empty()) {
            int lo = *std::min_element(node_labels.begin(), node_labels.end());
            for (auto& l : node_labels) l -= lo;
            num_node_labels = *std::max_element(node_labels.begin(), node_labels.end()) + 1;
        }
    } else if (mode == FeatureMode::kNodeLabelOnehot) {
        throw DataError("missing dataset file: " + node_label_path.string());
    }

    Dataset ds;
    ds.name = name;
    ds.num_classes = static_cast<int>(label_map.size());
    ds.feature_mode = mode;
    ds.degree_cap = degree_cap;
    ds.graphs.reserve(static_cast<std::size_t>(num_graphs));
    for (int g = 0; g < num_graphs; ++g) {
        Graph graph = make_graph(g, graph_size[static_cast<std::size_t>(g)],
                                 std::move(edges[static_cast<std::size_t>(g)]),
                                 label_map.at(raw_labels[static_cast<std::size_t>(g)]));
        if (mode == FeatureMode::kDegreeOnehot) {
            apply_degree_features(graph, degree_cap);
        } else {
            graph.feature_dim = num_node_labels;
            graph.node_features.assign(
                static_cast<std::size_t>(graph.num_nodes) * num_node_labels, 0.0);
        }
        ds.graphs.push_back(std::move(graph));
    }
    if (mode == FeatureMode::kNodeLabelOnehot) {
        for (int n = 0; n < total_nodes; ++n) {
            int g = node_graph[static_cast<std::size_t>(n)];
            int local = node_local[static_cast<std::size_t>(n)];
            auto& graph = ds.graphs[static_cast<std::size_t>(g)];
            graph.node_features[static_cast<std::size_t>(local) * graph.feature_dim +
                                node_labels[static_cast<std::size_t>(n)]] = 1.0;
        }
    }
    ds.split_of.assign(ds.graphs.size(), SplitKind::kTrain);
    ds.validate();
    return ds;
}

void write_tu_dataset(const std::string& root_path, const Dataset& dataset) {
    const fs::path dir = fs::path(root_path) / dataset.name;
    fs::create_directories(dir);
    std::ofstream a(dir / (dataset.name + "_A.txt"));
    std::ofstream ind(dir / (dataset.name + "_graph_indicator.txt"));
    std::ofstream lab(dir / (dataset.name + "_graph_labels.txt"));
    int offset = 0;
    for (std::size_t g = 0; g < dataset.graphs.size(); ++g) {
        const Graph& graph = dataset.graphs[g];
        for (int n = 0; n < graph.num_nodes; ++n) ind << (g + 1) << "\n";
        for (const auto& [u, v] : graph.edges) {
            a << (offset + u + 1) << ", " << (offset + v + 1) << "\n";
            a << (offset + v + 1) << ", " << (offset + u + 1) << "\n";
        }
        lab << graph.label << "\n";
        offset += graph.num_nodes;
    }
}

namespace {

nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["id"] = g.id;
    j["num_nodes"] = g.num_nodes;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [u, v] : g.edges) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    j["feature_dim"] = g.feature_dim;
    j["node_features"] = g.node_features;
    j["label"] = g.label;
    j["original_label"] = g.original_label;
    j["is_backdoored"] = g.is_backdoored;
    return j;
}

Graph graph_from_json(const nlohmann::json& j) {
    Graph g;
    g.id = j.at("id").get<int>();
    g.num_nodes = j.at("num_nodes").get<int>();
    for (const auto& e : j.at("edges"))
        g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    g.feature_dim = j.at("feature_dim").get<int>();
    g.node_features = j.at("node_features").get<std::vector<double>>();
    g.label = j.at("label").get<int>();
    g.original_label = j.at("original_label").get<int>();
    g.is_backdoored = j.at("is_backdoored").get<bool>();
    g.validate();
    return g;
}

}  // namespace

std::string dataset_to_json(const Dataset& dataset) {
    nlohmann::json j;
    j["name"] = dataset.name;
    j["num_classes"] = dataset.num_classes;
    j["feature_mode"] = to_string(dataset.feature_mode);
    j["degree_cap"] = dataset.degree_cap;
    nlohmann::json graphs = nlohmann::json::array();
    for (const auto& g : dataset.graphs) graphs.push_back(graph_to_json(g));
    j["graphs"] = std::move(graphs);
    nlohmann::json splits;
    for (auto kind : {SplitKind::kTrain, SplitKind::kValidation, SplitKind::kTest})
        splits[to_string(kind)] = dataset.split_ids(kind);
    j["splits"] = std::move(splits);
    return j.dump(2);
}

Dataset dataset_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Dataset ds;
    ds.name = j.at("name").get<std::string>();
    ds.num_classes = j.at("num_classes").get<int>();
    ds.feature_mode = feature_mode_from_string(j.at("feature_mode").get<std::string>());
    ds.degree_cap = j.at("degree_cap").get<int>();
    for (const auto& g : j.at("graphs")) ds.graphs.push_back(graph_from_json(g));
    ds.split_of.assign(ds.graphs.size(), SplitKind::kTrain);
    std::map<int, std::size_t> index_of;
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) index_of[ds.graphs[i].id] = i;
    for (auto kind : {SplitKind::kTrain, SplitKind::kValidation, SplitKind::kTest}) {
        for (int id : j.at("splits").at(to_string(kind)).get<std::vector<int>>()) {
            auto it = index_of.find(id);
            if (it == index_of.end())
                throw DataError("split references unknown graph id " + std::to_string(id));
            ds.split_of[it->second] = kind;
        }
    }
    ds.validate();
    return ds;
}

void save_dataset_json(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << dataset_to_json(dataset) << "\n";
}

Dataset load_dataset_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return dataset_from_json(ss.str());
}

}  // namespace graphguard
