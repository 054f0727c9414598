#include "graphguard/splits.hpp"

#include <cmath>
#include <map>

namespace graphguard {

Dataset split_dataset(Dataset dataset, double train_frac, double val_frac, std::uint64_t seed) {
    if (train_frac <= 0.0 || val_frac <= 0.0 || train_frac + val_frac > 1.0)
        throw ConfigError("split fractions must be positive and sum to at most 1");

    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < dataset.graphs.size(); ++i)
        by_label[dataset.graphs[i].label].push_back(i);

    Rng rng(seed);
    dataset.split_of.assign(dataset.graphs.size(), SplitKind::kTest);
    for (auto& [label, members] : by_label) {
        if (members.size() < 3)
            throw DataError("class " + std::to_string(label) +
                            " has fewer graphs than splits");
        rng.shuffle(members);
        const auto n = static_cast<double>(members.size());
        const auto n_train = static_cast<std::size_t>(std::lround(train_frac * n));
        const auto n_val = static_cast<std::size_t>(std::lround(val_frac * n));
        for (std::size_t i = 0; i < members.size(); ++i) {
            SplitKind kind = i < n_train                ? SplitKind::kTrain
                             : i < n_train + n_val      ? SplitKind::kValidation
                                                        : SplitKind::kTest;
            dataset.split_of[members[i]] = kind;
        }
    }
    dataset.validate();
    return dataset;
}

}  // namespace graphguard
