#pragma once

#include <string>

#include "graphguard/graph.hpp"

namespace graphguard {

// Reads a dataset in TUDataset text form from `root/name/`:
//   <name>_A.txt                1-indexed edge list, one "u, v" pair per line
//   <name>_graph_indicator.txt  graph id (1-indexed) of each node
//   <name>_graph_labels.txt     one label per graph (remapped to 0..C-1)
//   <name>_node_labels.txt      optional, required for node-label features
// Edges are deduplicated and symmetrized; graphs come back with all ids equal
// to their index and every graph in the train split (use split_dataset next).
Dataset load_tu_dataset(const std::string& root_path, const std::string& name,
                        FeatureMode mode = FeatureMode::kDegreeOnehot, int degree_cap = 10);

// Writes the dataset back out in the same text form (both edge directions,
// 1-indexed), so loader round-trips can be checked against generated corpora.
void write_tu_dataset(const std::string& root_path, const Dataset& dataset);

// Internal serialized form: one JSON document per dataset.
std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& text);
void save_dataset_json(const std::string& path, const Dataset& dataset);
Dataset load_dataset_json(const std::string& path);

}  // namespace graphguard
