#include "patprune/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace patprune::ad {

namespace {
constexpr real_t kInvSqrt2 = static_cast<real_t>(0.70710678118654752440);
constexpr real_t kInvSqrt2Pi = static_cast<real_t>(0.39894228040143267794);
} // namespace

Node* Tape::make(OpKind kind, RealMatrix value, std::vector<Node*> inputs) {
    nodes_.emplace_back();
    Node& n = nodes_.back();
    n.kind = kind;
    n.grad = zeros(value.rows, value.cols);
    n.value = std::move(value);
    n.inputs = std::move(inputs);
    n.index = static_cast<int>(nodes_.size()) - 1;
    return &n;
}

Node* Tape::leaf(RealMatrix v) {
    Node* n = make(OpKind::Leaf, std::move(v), {});
    leaves_.push_back(n);
    return n;
}

Node* Tape::custom(OpKind kind, RealMatrix value, std::vector<Node*> inputs,
                   std::function<void()> backward_fn) {
    Node* n = make(kind, std::move(value), std::move(inputs));
    n->backward_fn = std::move(backward_fn);
    return n;
}

Node* Tape::matmul(Node* a, Node* b) {
    Node* n = make(OpKind::MatMul, patprune::matmul(a->value, b->value), {a, b});
    n->backward_fn = [n, a, b] {
        axpy(a->grad, 1, matmul_bt(n->grad, b->value));
        axpy(b->grad, 1, matmul_at(a->value, n->grad));
    };
    return n;
}

Node* Tape::add(Node* a, Node* b) {
    const bool broadcast = b->value.rows == 1 && b->value.cols == a->value.cols &&
                           a->value.rows != 1;
    if (!broadcast) {
        require_same_shape(a->value, b->value, "add");
        Node* n = make(OpKind::Add, patprune::add(a->value, b->value), {a, b});
        n->backward_fn = [n, a, b] {
            axpy(a->grad, 1, n->grad);
            axpy(b->grad, 1, n->grad);
        };
        return n;
    }
    RealMatrix out = a->value;
    for (int r = 0; r < out.rows; ++r)
        for (int c = 0; c < out.cols; ++c) out.at(r, c) += b->value.at(0, c);
    Node* n = make(OpKind::AddRow, std::move(out), {a, b});
    n->backward_fn = [n, a, b] {
        axpy(a->grad, 1, n->grad);
        for (int r = 0; r < n->grad.rows; ++r)
            for (int c = 0; c < n->grad.cols; ++c) b->grad.at(0, c) += n->grad.at(r, c);
    };
    return n;
}

Node* Tape::sub(Node* a, Node* b) {
    require_same_shape(a->value, b->value, "sub");
    Node* n = make(OpKind::Sub, patprune::sub(a->value, b->value), {a, b});
    n->backward_fn = [n, a, b] {
        axpy(a->grad, 1, n->grad);
        axpy(b->grad, -1, n->grad);
    };
    return n;
}

Node* Tape::hadamard(Node* a, Node* b) {
    require_same_shape(a->value, b->value, "hadamard");
    Node* n = make(OpKind::Hadamard, patprune::hadamard(a->value, b->value), {a, b});
    n->backward_fn = [n, a, b] {
        for (size_t i = 0; i < n->grad.size(); ++i) {
            a->grad.data[i] += n->grad.data[i] * b->value.data[i];
            b->grad.data[i] += n->grad.data[i] * a->value.data[i];
        }
    };
    return n;
}

Node* Tape::scale(Node* a, real_t c) {
    Node* n = make(OpKind::Scale, patprune::scale(a->value, c), {a});
    n->backward_fn = [n, a, c] { axpy(a->grad, c, n->grad); };
    return n;
}

RealMatrix gelu_value(const RealMatrix& x) {
    RealMatrix out = x;
    for (real_t& v : out.data) {
        v = static_cast<real_t>(0.5) * v * (1 + std::erf(v * kInvSqrt2));
    }
    return out;
}

Node* Tape::gelu(Node* x) {
    Node* n = make(OpKind::Gelu, gelu_value(x->value), {x});
    n->backward_fn = [n, x] {
        for (size_t i = 0; i < n->grad.size(); ++i) {
            const real_t v = x->value.data[i];
            const real_t cdf = static_cast<real_t>(0.5) * (1 + std::erf(v * kInvSqrt2));
            const real_t pdf = kInvSqrt2Pi * std::exp(static_cast<real_t>(-0.5) * v * v);
            x->grad.data[i] += n->grad.data[i] * (cdf + v * pdf);
        }
    };
    return n;
}

Node* Tape::layer_norm(Node* x, Node* gain, Node* bias) {
    const int rows = x->value.rows, cols = x->value.cols;
    if (gain->value.rows != 1 || gain->value.cols != cols || bias->value.rows != 1 ||
        bias->value.cols != cols) {
        throw dimension_error("layer_norm: gain/bias must be 1x" + std::to_string(cols) +
                              ", got " + gain->value.shape_str() + " and " +
                              bias->value.shape_str());
    }
    RealMatrix out(rows, cols);
    RealMatrix xhat(rows, cols);
    std::vector<real_t> inv_std(rows);
    for (int r = 0; r < rows; ++r) {
        real_t mean = 0;
        for (int c = 0; c < cols; ++c) mean += x->value.at(r, c);
        mean /= cols;
        real_t var = 0;
        for (int c = 0; c < cols; ++c) {
            const real_t d = x->value.at(r, c) - mean;
            var += d * d;
        }
        var /= cols;
        const real_t s = 1 / std::sqrt(var + kLayerNormEpsilon);
        inv_std[r] = s;
        for (int c = 0; c < cols; ++c) {
            const real_t h = (x->value.at(r, c) - mean) * s;
            xhat.at(r, c) = h;
            out.at(r, c) = gain->value.at(0, c) * h + bias->value.at(0, c);
        }
    }
    Node* n = make(OpKind::LayerNorm, std::move(out), {x, gain, bias});
    n->backward_fn = [n, x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)] {
        const int rows = n->grad.rows, cols = n->grad.cols;
        for (int r = 0; r < rows; ++r) {
            real_t mean_h = 0, mean_hx = 0;
            for (int c = 0; c < cols; ++c) {
                const real_t h = gain->value.at(0, c) * n->grad.at(r, c);
                mean_h += h;
                mean_hx += h * xhat.at(r, c);
            }
            mean_h /= cols;
            mean_hx /= cols;
            for (int c = 0; c < cols; ++c) {
                const real_t h = gain->value.at(0, c) * n->grad.at(r, c);
                x->grad.at(r, c) += (h - mean_h - xhat.at(r, c) * mean_hx) * inv_std[r];
                gain->grad.at(0, c) += n->grad.at(r, c) * xhat.at(r, c);
                bias->grad.at(0, c) += n->grad.at(r, c);
            }
        }
    };
    return n;
}

RealMatrix softmax_rows_value(const RealMatrix& x) {
    RealMatrix out = x;
    for (int r = 0; r < x.rows; ++r) {
        real_t m = x.at(r, 0);
        for (int c = 1; c < x.cols; ++c) m = std::max(m, x.at(r, c));
        real_t z = 0;
        for (int c = 0; c < x.cols; ++c) {
            const real_t e = std::exp(x.at(r, c) - m);
            out.at(r, c) = e;
            z += e;
        }
        for (int c = 0; c < x.cols; ++c) out.at(r, c) /= z;
    }
    return out;
}

Node* Tape::softmax_rows(Node* x) {
    Node* n = make(OpKind::SoftmaxRows, softmax_rows_value(x->value), {x});
    n->backward_fn = [n, x] {
        for (int r = 0; r < n->grad.rows; ++r) {
            real_t dot = 0;
            for (int c = 0; c < n->grad.cols; ++c) dot += n->grad.at(r, c) * n->value.at(r, c);
            for (int c = 0; c < n->grad.cols; ++c) {
                x->grad.at(r, c) += n->value.at(r, c) * (n->grad.at(r, c) - dot);
            }
        }
    };
    return n;
}

Node* Tape::cross_entropy(Node* logits, const std::vector<int>& labels) {
    const int rows = logits->value.rows, cols = logits->value.cols;
    if (static_cast<int>(labels.size()) != rows) {
        throw dimension_error("cross_entropy: " + std::to_string(labels.size()) +
                              " labels for " + std::to_string(rows) + " logit rows");
    }
    for (int r = 0; r < rows; ++r) {
        if (labels[r] < 0 || labels[r] >= cols) {
            throw input_error("cross_entropy: label " + std::to_string(labels[r]) +
                              " out of range [0, " + std::to_string(cols) + ")");
        }
    }
    RealMatrix probs = softmax_rows_value(logits->value);
    real_t loss = 0;
    for (int r = 0; r < rows; ++r) {
        loss -= std::log(std::max(probs.at(r, labels[r]), static_cast<real_t>(1e-300)));
    }
    loss /= rows;
    RealMatrix out(1, 1);
    out.at(0, 0) = loss;
    Node* n = make(OpKind::CrossEntropy, std::move(out), {logits});
    n->backward_fn = [n, logits, labels, probs = std::move(probs)] {
        const real_t g = n->grad.at(0, 0) / probs.rows;
        for (int r = 0; r < probs.rows; ++r) {
            for (int c = 0; c < probs.cols; ++c) {
                const real_t target = (c == labels[r]) ? 1 : 0;
                logits->grad.at(r, c) += g * (probs.at(r, c) - target);
            }
        }
    };
    return n;
}

Node* Tape::transpose(Node* a) {
    Node* n = make(OpKind::Transpose, patprune::transpose(a->value), {a});
    n->backward_fn = [n, a] { axpy(a->grad, 1, patprune::transpose(n->grad)); };
    return n;
}

Node* Tape::gather_rows(Node* table, const std::vector<int>& indices) {
    const int cols = table->value.cols;
    for (int i : indices) {
        if (i < 0 || i >= table->value.rows) {
            throw input_error("gather_rows: index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(table->value.rows) + ")");
        }
    }
    RealMatrix out(static_cast<int>(indices.size()), cols);
    for (size_t r = 0; r < indices.size(); ++r) {
        for (int c = 0; c < cols; ++c) out.at(static_cast<int>(r), c) = table->value.at(indices[r], c);
    }
    Node* n = make(OpKind::GatherRows, std::move(out), {table});
    n->backward_fn = [n, table, indices] {
        for (size_t r = 0; r < indices.size(); ++r) {
            for (int c = 0; c < n->grad.cols; ++c) {
                table->grad.at(indices[r], c) += n->grad.at(static_cast<int>(r), c);
            }
        }
    };
    return n;
}

Node* Tape::mean_pool_rows(Node* x, int batch, int seq_len, const std::vector<int>& lengths) {
    if (x->value.rows != batch * seq_len) {
        throw dimension_error("mean_pool_rows: expected " + std::to_string(batch * seq_len) +
                              " rows, got " + std::to_string(x->value.rows));
    }
    if (static_cast<int>(lengths.size()) != batch) {
        throw dimension_error("mean_pool_rows: lengths size " + std::to_string(lengths.size()) +
                              " does not match batch " + std::to_string(batch));
    }
    RealMatrix out(batch, x->value.cols);
    for (int b = 0; b < batch; ++b) {
        const int len = lengths[b];
        if (len < 1 || len > seq_len) {
            throw input_error("mean_pool_rows: length " + std::to_string(len) +
                              " out of range [1, " + std::to_string(seq_len) + "]");
        }
        for (int t = 0; t < len; ++t) {
            for (int c = 0; c < x->value.cols; ++c) {
                out.at(b, c) += x->value.at(b * seq_len + t, c);
            }
        }
        for (int c = 0; c < x->value.cols; ++c) out.at(b, c) /= len;
    }
    Node* n = make(OpKind::MeanPoolRows, std::move(out), {x});
    n->backward_fn = [n, x, batch, seq_len, lengths] {
        for (int b = 0; b < batch; ++b) {
            const real_t inv = static_cast<real_t>(1) / lengths[b];
            for (int t = 0; t < lengths[b]; ++t) {
                for (int c = 0; c < n->grad.cols; ++c) {
                    x->grad.at(b * seq_len + t, c) += n->grad.at(b, c) * inv;
                }
            }
        }
    };
    return n;
}

Node* Tape::sum(Node* a) {
    RealMatrix out(1, 1);
    out.at(0, 0) = patprune::sum(a->value);
    Node* n = make(OpKind::Sum, std::move(out), {a});
    n->backward_fn = [n, a] {
        const real_t g = n->grad.at(0, 0);
        for (real_t& v : a->grad.data) v += g;
    };
    return n;
}

void Tape::backward(Node* loss) {
    if (loss->value.rows != 1 || loss->value.cols != 1) {
        throw contract_error("backward: root must be 1x1, got " + loss->value.shape_str());
    }
    if (backward_run_) {
        throw state_error("backward: tape already differentiated; rebuild the graph first");
    }
    backward_run_ = true;
    loss->grad.at(0, 0) = 1;
    for (int i = loss->index; i >= 0; --i) {
        Node& n = nodes_[static_cast<size_t>(i)];
        if (n.backward_fn) n.backward_fn();
    }
}

double grad_check(const std::function<double(const RealMatrix&)>& f,
                  const std::function<RealMatrix(const RealMatrix&)>& analytic_grad,
                  const RealMatrix& at, double step) {
    if (step <= 0) throw config_error("grad_check: step must be positive");
    const RealMatrix g = analytic_grad(at);
    require_same_shape(g, at, "grad_check");
    double max_rel = 0;
    RealMatrix probe = at;
    for (size_t i = 0; i < probe.size(); ++i) {
        const real_t keep = probe.data[i];
        probe.data[i] = keep + static_cast<real_t>(step);
        const double fp = f(probe);
        probe.data[i] = keep - static_cast<real_t>(step);
        const double fm = f(probe);
        probe.data[i] = keep;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw numeric_error("grad_check: objective returned a non-finite value");
        }
        const double numeric = (fp - fm) / (2 * step);
        const double analytic = g.data[i];
        const double rel =
            std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

} // namespace patprune::ad
