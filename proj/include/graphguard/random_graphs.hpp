#pragma once

#include "graphguard/common.hpp"
#include "graphguard/graph.hpp"

namespace graphguard {

enum class TriggerModel { kER, kSW, kPA, kAdaptive };

std::string to_string(TriggerModel model);
TriggerModel trigger_model_from_string(const std::string& s);

// Parameters for one trigger family. `size` is the trigger node count for
// the random models; the adaptive attack reads it as the edge budget.
struct TriggerSpec {
    TriggerModel model = TriggerModel::kER;
    int size = 6;
    double er_p = 1.0;    // pair inclusion probability (ER)
    int sw_k = 2;         // ring neighbor count, even (SW)
    double sw_beta = 0.5; // rewiring probability (SW)
    int pa_m = 2;         // edges added per new node (PA)
    std::uint64_t seed = 0;

    void validate() const;
};

// Samples an unlabeled trigger subgraph on nodes 0..size-1.
//   ER: each of the size*(size-1)/2 pairs kept independently with prob er_p.
//   SW: ring lattice of sw_k neighbors, each ring edge rewired with prob sw_beta.
//   PA: pa_m-node clique seed, then degree-proportional attachment of pa_m
//       edges per new node.
// Deterministic given the generator state.
Graph gen_trigger(const TriggerSpec& spec, Rng& rng);

}  // namespace graphguard
