#pragma once

#include <vector>

#include "graphguard/tensor.hpp"

namespace graphguard {

enum class OptimizerKind { kSGD, kAdam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& s);

// First-order optimizer over a fixed set of leaf tensors. Adam uses
// beta1=0.9, beta2=0.999, eps=1e-8 with bias correction.
class Optimizer {
public:
    Optimizer(std::vector<Tensor> params, OptimizerKind kind, double learning_rate);

    // Applies one update from the accumulated gradients, then clears them.
    void step();
    void zero_grad();

    double learning_rate() const { return lr_; }

private:
    std::vector<Tensor> params_;
    OptimizerKind kind_;
    double lr_;
    long step_count_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

}  // namespace graphguard
