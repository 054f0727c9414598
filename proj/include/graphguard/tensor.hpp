#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "graphguard/common.hpp"

namespace graphguard {

// Dense 2-D tensor with reverse-mode differentiation. A Tensor is a cheap
// handle onto a node in an expression DAG; every op records its parents and
// a backward closure, and backward() replays the tape in reverse topological
// order. Leaves created with requires_grad=true receive gradients; anything
// downstream of a non-grad leaf is treated as a constant.
//
// Row vectors are 1 x m, column vectors n x 1, scalars 1 x 1.
class Tensor {
public:
    struct Node {
        int rows = 0;
        int cols = 0;
        std::vector<double> values;
        std::vector<double> grad;
        bool requires_grad = false;
        std::vector<std::shared_ptr<Node>> parents;
        std::function<void(Node&)> backward_fn;

        std::size_t size() const { return values.size(); }
        void ensure_grad() {
            if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
        }
    };

    Tensor() = default;

    static Tensor leaf(int rows, int cols, std::vector<double> values, bool requires_grad);
    static Tensor zeros(int rows, int cols, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    int rows() const { return node_->rows; }
    int cols() const { return node_->cols; }
    std::size_t size() const { return node_->values.size(); }
    bool requires_grad() const { return node_->requires_grad; }

    double value(int i, int j) const { return node_->values[static_cast<std::size_t>(i) * node_->cols + j]; }
    double item() const;
    const std::vector<double>& values() const { return node_->values; }
    std::vector<double>& mutable_values() { return node_->values; }
    const std::vector<double>& grad() const;
    void zero_grad() { node_->grad.assign(node_->values.size(), 0.0); }

    // Only meaningful on leaves; flips whether backward writes a gradient.
    void set_requires_grad(bool on) { node_->requires_grad = on; }

    std::shared_ptr<Node> node() const { return node_; }
    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<Node> node_;
};

// Runs reverse-mode accumulation from a scalar root.
void backward(const Tensor& root);

// Elementwise / broadcast arithmetic.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_const(const Tensor& a, double c);
Tensor mul_const(const Tensor& a, double c);
Tensor add_rowvec(const Tensor& a, const Tensor& row);   // a: n x m, row: 1 x m
Tensor sub_rowvec(const Tensor& a, const Tensor& row);
Tensor mul_rowvec(const Tensor& a, const Tensor& row);
Tensor div_rowvec(const Tensor& a, const Tensor& row);
Tensor mul_colvec(const Tensor& a, const Tensor& col);   // scales row i by col[i]
Tensor scalar_mul(const Tensor& s, const Tensor& a);     // s: 1 x 1

// Nonlinearities and elementwise transforms.
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor log_elem(const Tensor& a);
Tensor pow_const(const Tensor& a, double p);

// Contractions and reductions.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor row_sum(const Tensor& a);   // n x m -> n x 1
Tensor col_sum(const Tensor& a);   // n x m -> 1 x m
Tensor col_mean(const Tensor& a);  // n x m -> 1 x m
Tensor sum_all(const Tensor& a);   // -> 1 x 1
Tensor mean_all(const Tensor& a);  // -> 1 x 1

// Extracts one entry as a 1 x 1 tensor (gradient scatters back).
Tensor pick(const Tensor& a, int row, int col);

// Builds a symmetric n x n matrix with mask[e] at both orientations of
// edge e and `self_loop` on the diagonal.
Tensor scatter_edges(const Tensor& mask, const std::vector<std::pair<int, int>>& edges, int n,
                     double self_loop);

// out[i][j] = a[i][j] * d[i] * d[j] with d a column vector (degree scaling).
Tensor outer_scale(const Tensor& a, const Tensor& d);

// Fused softmax + cross-entropy on a 1 x C logit row. Backward emits
// softmax(logits) - onehot(label).
Tensor softmax_cross_entropy(const Tensor& logits, int label);

// Plain softmax of a logit row (no tape).
std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace graphguard
