#include "graphguard/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace graphguard {

namespace {

using Node = Tensor::Node;
using NodePtr = std::shared_ptr<Node>;

Tensor make_node(int rows, int cols, std::vector<double> values, std::vector<NodePtr> parents,
                 std::function<void(Node&)> backward_fn) {
    auto node = std::make_shared<Node>();
    node->rows = rows;
    node->cols = cols;
    node->values = std::move(values);
    bool needs = false;
    for (const auto& p : parents) needs = needs || p->requires_grad;
    node->requires_grad = needs;
    if (needs) {
        node->parents = std::move(parents);
        node->backward_fn = std::move(backward_fn);
    }
    return Tensor(node);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError(std::string(op) + ": shape mismatch");
}

void check_finite(const std::vector<double>& v, const char* op) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError(std::string(op) + ": non-finite value");
    }
    (void)op;
}

}  // namespace

Tensor Tensor::leaf(int rows, int cols, std::vector<double> values, bool requires_grad) {
    if (values.size() != static_cast<std::size_t>(rows) * cols)
        throw ShapeError("leaf: value count does not match shape");
    auto node = std::make_shared<Node>();
    node->rows = rows;
    node->cols = cols;
    node->values = std::move(values);
    node->requires_grad = requires_grad;
    return Tensor(node);
}

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
    return leaf(rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0),
                requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return leaf(1, 1, {value}, requires_grad);
}

double Tensor::item() const {
    if (size() != 1) throw ShapeError("item: tensor is not a scalar");
    return node_->values[0];
}

const std::vector<double>& Tensor::grad() const {
    if (node_->grad.size() != node_->values.size())
        throw Error("grad accessed before backward");
    return node_->grad;
}

void backward(const Tensor& root) {
    if (root.size() != 1) throw ShapeError("backward: root must be a scalar");
    if (!root.requires_grad()) return;

    // Post-order DFS (iterative; tapes from batched losses can get long).
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.node().get(), 0);
    seen.insert(root.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->requires_grad && seen.insert(parent).second)
                stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (Node* node : order) node->ensure_grad();
    root.node()->grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->backward_fn) {
            for (auto& p : node->parents) p->ensure_grad();
            node->backward_fn(*node);
        }
    }
}

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
    auto an = a.node();
    auto bn = b.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an, bn}, [an, bn](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) {
            if (an->requires_grad) an->grad[i] += self.grad[i];
            if (bn->requires_grad) bn->grad[i] += self.grad[i];
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
    auto an = a.node();
    auto bn = b.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an, bn}, [an, bn](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) {
            if (an->requires_grad) an->grad[i] += self.grad[i];
            if (bn->requires_grad) bn->grad[i] -= self.grad[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
    auto an = a.node();
    auto bn = b.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an, bn}, [an, bn](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) {
            if (an->requires_grad) an->grad[i] += self.grad[i] * bn->values[i];
            if (bn->requires_grad) bn->grad[i] += self.grad[i] * an->values[i];
        }
    });
}

Tensor add_const(const Tensor& a, double c) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + c;
    auto an = a.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an}, [an](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) an->grad[i] += self.grad[i];
    });
}

Tensor mul_const(const Tensor& a, double c) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * c;
    auto an = a.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an}, [an, c](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) an->grad[i] += self.grad[i] * c;
    });
}

namespace {

enum class RowVecOp { kAdd, kSub, kMul, kDiv };

Tensor rowvec_op(const Tensor& a, const Tensor& row, RowVecOp op, const char* name) {
    if (row.rows() != 1 || row.cols() != a.cols())
        throw ShapeError(std::string(name) + ": row vector shape mismatch");
    const int n = a.rows(), m = a.cols();
    std::vector<double> out(a.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * m + j;
            const double r = row.values()[static_cast<std::size_t>(j)];
            switch (op) {
                case RowVecOp::kAdd: out[idx] = a.values()[idx] + r; break;
                case RowVecOp::kSub: out[idx] = a.values()[idx] - r; break;
                case RowVecOp::kMul: out[idx] = a.values()[idx] * r; break;
                case RowVecOp::kDiv: out[idx] = a.values()[idx] / r; break;
            }
        }
    }
    auto an = a.node();
    auto rn = row.node();
    return make_node(n, m, std::move(out), {an, rn}, [an, rn, n, m, op](Node& self) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                const std::size_t idx = static_cast<std::size_t>(i) * m + j;
                const std::size_t jj = static_cast<std::size_t>(j);
                const double g = self.grad[idx];
                const double av = an->values[idx];
                const double rv = rn->values[jj];
                switch (op) {
                    case RowVecOp::kAdd:
                        if (an->requires_grad) an->grad[idx] += g;
                        if (rn->requires_grad) rn->grad[jj] += g;
                        break;
                    case RowVecOp::kSub:
                        if (an->requires_grad) an->grad[idx] += g;
                        if (rn->requires_grad) rn->grad[jj] -= g;
                        break;
                    case RowVecOp::kMul:
                        if (an->requires_grad) an->grad[idx] += g * rv;
                        if (rn->requires_grad) rn->grad[jj] += g * av;
                        break;
                    case RowVecOp::kDiv:
                        if (an->requires_grad) an->grad[idx] += g / rv;
                        if (rn->requires_grad) rn->grad[jj] -= g * av / (rv * rv);
                        break;
                }
            }
        }
    });
}

}  // namespace

Tensor add_rowvec(const Tensor& a, const Tensor& row) { return rowvec_op(a, row, RowVecOp::kAdd, "add_rowvec"); }
Tensor sub_rowvec(const Tensor& a, const Tensor& row) { return rowvec_op(a, row, RowVecOp::kSub, "sub_rowvec"); }
Tensor mul_rowvec(const Tensor& a, const Tensor& row) { return rowvec_op(a, row, RowVecOp::kMul, "mul_rowvec"); }
Tensor div_rowvec(const Tensor& a, const Tensor& row) { return rowvec_op(a, row, RowVecOp::kDiv, "div_rowvec"); }

Tensor mul_colvec(const Tensor& a, const Tensor& col) {
    if (col.cols() != 1 || col.rows() != a.rows())
        throw ShapeError("mul_colvec: column vector shape mismatch");
    const int n = a.rows(), m = a.cols();
    std::vector<double> out(a.size());
    for (int i = 0; i < n; ++i) {
        const double c = col.values()[static_cast<std::size_t>(i)];
        for (int j = 0; j < m; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * m + j;
            out[idx] = a.values()[idx] * c;
        }
    }
    auto an = a.node();
    auto cn = col.node();
    return make_node(n, m, std::move(out), {an, cn}, [an, cn, n, m](Node& self) {
        for (int i = 0; i < n; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            for (int j = 0; j < m; ++j) {
                const std::size_t idx = ii * m + j;
                const double g = self.grad[idx];
                if (an->requires_grad) an->grad[idx] += g * cn->values[ii];
                if (cn->requires_grad) cn->grad[ii] += g * an->values[idx];
            }
        }
    });
}

Tensor scalar_mul(const Tensor& s, const Tensor& a) {
    if (s.size() != 1) throw ShapeError("scalar_mul: first argument must be 1x1");
    const double sv = s.values()[0];
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sv * a.values()[i];
    auto sn = s.node();
    auto an = a.node();
    return make_node(a.rows(), a.cols(), std::move(out), {sn, an}, [sn, an](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) {
            if (sn->requires_grad) sn->grad[0] += self.grad[i] * an->values[i];
            if (an->requires_grad) an->grad[i] += self.grad[i] * sn->values[0];
        }
    });
}

Tensor relu(const Tensor& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, a.values()[i]);
    auto an = a.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an}, [an](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) {
            if (an->values[i] > 0.0) an->grad[i] += self.grad[i];
        }
    });
}

Tensor sigmoid(const Tensor& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-a.values()[i]));
    auto an = a.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an}, [an](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) {
            const double s = self.values[i];
            an->grad[i] += self.grad[i] * s * (1.0 - s);
        }
    });
}

Tensor log_elem(const Tensor& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(a.values()[i]);
    check_finite(out, "log");
    auto an = a.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an}, [an](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i) an->grad[i] += self.grad[i] / an->values[i];
    });
}

Tensor pow_const(const Tensor& a, double p) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(a.values()[i], p);
    auto an = a.node();
    return make_node(a.rows(), a.cols(), std::move(out), {an}, [an, p](Node& self) {
        for (std::size_t i = 0; i < self.size(); ++i)
            an->grad[i] += self.grad[i] * p * std::pow(an->values[i], p - 1.0);
    });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
    const int n = a.rows(), k = a.cols(), m = b.cols();
    std::vector<double> out(static_cast<std::size_t>(n) * m, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < k; ++l) {
            const double av = a.values()[static_cast<std::size_t>(i) * k + l];
            if (av == 0.0) continue;
            const std::size_t brow = static_cast<std::size_t>(l) * m;
            const std::size_t orow = static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) out[orow + j] += av * b.values()[brow + j];
        }
    }
    auto an = a.node();
    auto bn = b.node();
    return make_node(n, m, std::move(out), {an, bn}, [an, bn, n, k, m](Node& self) {
        // dA = G B^T, dB = A^T G
        if (an->requires_grad) {
            for (int i = 0; i < n; ++i) {
                for (int l = 0; l < k; ++l) {
                    double acc = 0.0;
                    const std::size_t grow = static_cast<std::size_t>(i) * m;
                    const std::size_t brow = static_cast<std::size_t>(l) * m;
                    for (int j = 0; j < m; ++j) acc += self.grad[grow + j] * bn->values[brow + j];
                    an->grad[static_cast<std::size_t>(i) * k + l] += acc;
                }
            }
        }
        if (bn->requires_grad) {
            for (int l = 0; l < k; ++l) {
                for (int i = 0; i < n; ++i) {
                    const double av = an->values[static_cast<std::size_t>(i) * k + l];
                    if (av == 0.0) continue;
                    const std::size_t grow = static_cast<std::size_t>(i) * m;
                    const std::size_t brow = static_cast<std::size_t>(l) * m;
                    for (int j = 0; j < m; ++j) bn->grad[brow + j] += av * self.grad[grow + j];
                }
            }
        }
    });
}

Tensor row_sum(const Tensor& a) {
    const int n = a.rows(), m = a.cols();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(i)] += a.value(i, j);
    }
    auto an = a.node();
    return make_node(n, 1, std::move(out), {an}, [an, n, m](Node& self) {
        for (int i = 0; i < n; ++i) {
            const double g = self.grad[static_cast<std::size_t>(i)];
            for (int j = 0; j < m; ++j) an->grad[static_cast<std::size_t>(i) * m + j] += g;
        }
    });
}

Tensor col_sum(const Tensor& a) {
    const int n = a.rows(), m = a.cols();
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(j)] += a.value(i, j);
    }
    auto an = a.node();
    return make_node(1, m, std::move(out), {an}, [an, n, m](Node& self) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j)
                an->grad[static_cast<std::size_t>(i) * m + j] += self.grad[static_cast<std::size_t>(j)];
        }
    });
}

Tensor col_mean(const Tensor& a) { return mul_const(col_sum(a), 1.0 / a.rows()); }

Tensor sum_all(const Tensor& a) {
    double total = 0.0;
    for (double v : a.values()) total += v;
    auto an = a.node();
    return make_node(1, 1, {total}, {an}, [an](Node& self) {
        for (std::size_t i = 0; i < an->size(); ++i) an->grad[i] += self.grad[0];
    });
}

Tensor mean_all(const Tensor& a) { return mul_const(sum_all(a), 1.0 / static_cast<double>(a.size())); }

Tensor pick(const Tensor& a, int row, int col) {
    if (row < 0 || row >= a.rows() || col < 0 || col >= a.cols())
        throw ShapeError("pick: index out of range");
    const std::size_t idx = static_cast<std::size_t>(row) * a.cols() + col;
    auto an = a.node();
    return make_node(1, 1, {a.values()[idx]}, {an}, [an, idx](Node& self) {
        an->grad[idx] += self.grad[0];
    });
}

Tensor scatter_edges(const Tensor& mask, const std::vector<std::pair<int, int>>& edges, int n,
                     double self_loop) {
    if (mask.size() != edges.size()) throw ShapeError("scatter_edges: mask length != edge count");
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i) * n + i] = self_loop;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        out[static_cast<std::size_t>(u) * n + v] = mask.values()[e];
        out[static_cast<std::size_t>(v) * n + u] = mask.values()[e];
    }
    auto mn = mask.node();
    auto edges_copy = edges;
    return make_node(n, n, std::move(out), {mn}, [mn, edges_copy, n](Node& self) {
        for (std::size_t e = 0; e < edges_copy.size(); ++e) {
            const auto [u, v] = edges_copy[e];
            mn->grad[e] += self.grad[static_cast<std::size_t>(u) * n + v] +
                           self.grad[static_cast<std::size_t>(v) * n + u];
        }
    });
}

Tensor outer_scale(const Tensor& a, const Tensor& d) {
    if (a.rows() != a.cols() || d.cols() != 1 || d.rows() != a.rows())
        throw ShapeError("outer_scale: expects square matrix and matching column vector");
    const int n = a.rows();
    std::vector<double> out(a.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out[static_cast<std::size_t>(i) * n + j] =
                a.value(i, j) * d.values()[static_cast<std::size_t>(i)] *
                d.values()[static_cast<std::size_t>(j)];
        }
    }
    auto an = a.node();
    auto dn = d.node();
    return make_node(n, n, std::move(out), {an, dn}, [an, dn, n](Node& self) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const std::size_t idx = static_cast<std::size_t>(i) * n + j;
                const double g = self.grad[idx];
                if (g == 0.0) continue;
                const double av = an->values[idx];
                const double di = dn->values[static_cast<std::size_t>(i)];
                const double dj = dn->values[static_cast<std::size_t>(j)];
                if (an->requires_grad) an->grad[idx] += g * di * dj;
                if (dn->requires_grad) {
                    dn->grad[static_cast<std::size_t>(i)] += g * av * dj;
                    dn->grad[static_cast<std::size_t>(j)] += g * av * di;
                }
            }
        }
    });
}

Tensor softmax_cross_entropy(const Tensor& logits, int label) {
    if (logits.rows() != 1) throw ShapeError("softmax_cross_entropy: expects a 1 x C logit row");
    if (label < 0 || label >= logits.cols())
        throw ShapeError("softmax_cross_entropy: label out of range");
    const auto probs = softmax(logits.values());
    const double loss = -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-300));
    auto ln = logits.node();
    return make_node(1, 1, {loss}, {ln}, [ln, probs, label](Node& self) {
        const double g = self.grad[0];
        for (std::size_t j = 0; j < probs.size(); ++j) {
            double delta = probs[j] - (static_cast<int>(j) == label ? 1.0 : 0.0);
            ln->grad[j] += g * delta;
        }
    });
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        total += out[i];
    }
    for (auto& v : out) v /= total;
    return out;
}

}  // namespace graphguard
