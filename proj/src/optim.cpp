#include "graphguard/optim.hpp"

#include <cmath>

namespace graphguard {

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::kSGD ? "sgd" : "adam";
}

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "sgd" || s == "SGD") return OptimizerKind::kSGD;
    if (s == "adam" || s == "Adam") return OptimizerKind::kAdam;
    throw ConfigError("unknown optimizer: " + s);
}

Optimizer::Optimizer(std::vector<Tensor> params, OptimizerKind kind, double learning_rate)
    : params_(std::move(params)), kind_(kind), lr_(learning_rate) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (std::size_t p = 0; p < params_.size(); ++p) {
        m_[p].assign(params_[p].size(), 0.0);
        v_[p].assign(params_[p].size(), 0.0);
        params_[p].zero_grad();
    }
}

void Optimizer::step() {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    ++step_count_;
    for (std::size_t p = 0; p < params_.size(); ++p) {
        auto& values = params_[p].mutable_values();
        const auto& grad = params_[p].grad();
        if (kind_ == OptimizerKind::kSGD) {
            for (std::size_t i = 0; i < values.size(); ++i) values[i] -= lr_ * grad[i];
        } else {
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_count_));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_count_));
            for (std::size_t i = 0; i < values.size(); ++i) {
                m_[p][i] = kBeta1 * m_[p][i] + (1.0 - kBeta1) * grad[i];
                v_[p][i] = kBeta2 * v_[p][i] + (1.0 - kBeta2) * grad[i] * grad[i];
                values[i] -= lr_ * (m_[p][i] / bc1) / (std::sqrt(v_[p][i] / bc2) + kEps);
            }
        }
    }
    zero_grad();
}

void Optimizer::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

}  // namespace graphguard
