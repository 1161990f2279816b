#pragma once

#include "patprune/matrix.hpp"

#include <deque>
#include <functional>
#include <string>
#include <vector>

namespace patprune::ad {

enum class OpKind {
    Leaf,
    MatMul,
    Add,
    AddRow, // broadcast of a 1xC row over rows
    Sub,
    Hadamard,
    Scale,
    Gelu,
    LayerNorm,
    SoftmaxRows,
    CrossEntropy,
    Transpose,
    GatherRows,
    MeanPoolRows,
    Attention,
    Sum,
};

// One node of the define-by-run graph. Values are computed eagerly at
// construction; gradients accumulate during the single backward pass.
struct Node {
    OpKind kind = OpKind::Leaf;
    RealMatrix value;
    RealMatrix grad; // zero-initialized, same shape as value
    std::vector<Node*> inputs;
    std::function<void()> backward_fn;
    int index = -1; // creation order; reverse order is a topological order

    real_t scalar() const { return value.at(0, 0); }
};

// Owns the graph for one forward pass. Rebuilt per step; a tape admits
// exactly one backward pass.
class Tape {
public:
    Node* leaf(RealMatrix v);

    Node* matmul(Node* a, Node* b);
    // b is either a's shape or a 1 x a.cols row broadcast over rows.
    Node* add(Node* a, Node* b);
    Node* sub(Node* a, Node* b);
    Node* hadamard(Node* a, Node* b);
    Node* scale(Node* a, real_t c);
    Node* gelu(Node* x);
    // Per-row normalization with epsilon 1e-5; gain/bias are 1 x cols.
    Node* layer_norm(Node* x, Node* gain, Node* bias);
    Node* softmax_rows(Node* x);
    // Mean over rows of -log softmax(logits)[label]; returns a 1x1 node.
    Node* cross_entropy(Node* logits, const std::vector<int>& labels);
    Node* transpose(Node* a);
    // Rows of table selected by index; backward scatter-adds.
    Node* gather_rows(Node* table, const std::vector<int>& indices);
    // x is (batch * seq_len) x d; output row b averages the first
    // lengths[b] rows of sequence b.
    Node* mean_pool_rows(Node* x, int batch, int seq_len, const std::vector<int>& lengths);
    Node* sum(Node* a);

    // Populates gradients of every node reachable from loss. loss must be
    // 1x1; a second call on the same tape is rejected.
    void backward(Node* loss);

    const std::vector<Node*>& leaves() const { return leaves_; }
    size_t node_count() const { return nodes_.size(); }

    // Attention is registered by the model module (fused op); this hook
    // keeps Tape generic.
    Node* custom(OpKind kind, RealMatrix value, std::vector<Node*> inputs,
                 std::function<void()> backward_fn);

private:
    Node* make(OpKind kind, RealMatrix value, std::vector<Node*> inputs);

    std::deque<Node> nodes_;
    std::vector<Node*> leaves_;
    bool backward_run_ = false;
};

constexpr real_t kLayerNormEpsilon = static_cast<real_t>(1e-5);

// Forward-only kernels shared with the fused attention op and tests.
RealMatrix softmax_rows_value(const RealMatrix& x);
RealMatrix gelu_value(const RealMatrix& x);

// Max over entries of |analytic - numeric| / max(1e-8, |analytic| + |numeric|),
// numeric being the central difference of f at the given step.
double grad_check(const std::function<double(const RealMatrix&)>& f,
                  const std::function<RealMatrix(const RealMatrix&)>& analytic_grad,
                  const RealMatrix& at, double step);

} // namespace patprune::ad
