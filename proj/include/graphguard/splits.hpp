#pragma once

#include "graphguard/common.hpp"
#include "graphguard/graph.hpp"

namespace graphguard {

// Stratified-by-label random partition into train/validation/test. Per-class
// counts are round(frac * class_size); the remainder is test. Deterministic
// per seed. Throws ConfigError when the fractions are invalid and DataError
// when a class has fewer graphs than the three splits.
Dataset split_dataset(Dataset dataset, double train_frac, double val_frac, std::uint64_t seed);

}  // namespace graphguard
