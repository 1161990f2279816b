#pragma once

#include "patprune/autodiff.hpp"
#include "patprune/data.hpp"
#include "patprune/pattern.hpp"
#include "patprune/srste.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace patprune {

struct EncoderConfig {
    int n_layers = 2;
    int d_model = 32;
    int n_heads = 2;
    int d_ff = 64;
    int vocab_size = 32;
    int max_seq_len = 16;
    int n_classes = 2;

    int d_head() const { return d_model / n_heads; }
    void validate() const;
};

// Dynamic pattern pruning of the pre-softmax attention map.
struct AttentionPruneConfig {
    bool enabled = false;
    SparsityConfig cfg;
    real_t sentinel = static_cast<real_t>(-1e9);
    // Scores rank by signed value by default (larger score, more attention
    // mass); magnitude ranking available for experiments.
    bool by_magnitude = false;

    AttentionPruneConfig() { cfg.mode = ProjectionMode::TopKOnly; }

    void validate(int seq_len) const;
};

struct LayerParams {
    RealMatrix wq, wk, wv, wo;     // d_model x d_model
    RealMatrix bq, bk, bv, bo;     // 1 x d_model
    RealMatrix ln1_gain, ln1_bias; // 1 x d_model
    RealMatrix w_ff1;              // d_model x d_ff
    RealMatrix b_ff1;              // 1 x d_ff
    RealMatrix w_ff2;              // d_ff x d_model
    RealMatrix b_ff2;              // 1 x d_model
    RealMatrix ln2_gain, ln2_bias; // 1 x d_model
};

// All encoder parameters. The prunable set is the six projection/FFN
// matrices per layer; embeddings, biases, layer norms and the classifier
// head are never pruned and never weight-decayed.
struct ModelParams {
    EncoderConfig config;
    RealMatrix tok_embedding; // vocab_size x d_model
    RealMatrix pos_embedding; // max_seq_len x d_model
    std::vector<LayerParams> layers;
    RealMatrix w_cls; // d_model x n_classes
    RealMatrix b_cls; // 1 x n_classes

    static ModelParams init(const EncoderConfig& cfg, uint64_t seed);

    // Deterministic order: layer-major, then q, k, v, o, ff1, ff2.
    std::vector<std::pair<std::string, RealMatrix*>> collect_prunable();
    std::vector<std::pair<std::string, const RealMatrix*>> collect_prunable() const;

    // Every trainable parameter, prunable or not, in a fixed order.
    std::vector<std::pair<std::string, RealMatrix*>> all_params();
    std::vector<std::pair<std::string, const RealMatrix*>> all_params() const;

    RealMatrix* find(const std::string& id);
    // Biases and layer-norm parameters: exempt from weight decay and from
    // SR-STE decay.
    static bool is_decay_exempt(const std::string& id);
};

using MaskMap = std::map<std::string, KeepMask>;

// Replace pruned entries of the pre-softmax score matrix with the
// sentinel: per block, the keep_k largest scores survive (by value unless
// by_magnitude), ties to the smaller row-major index. Gradients flow only
// through kept entries.
RealMatrix attention_prune_scores(const RealMatrix& scores, const AttentionPruneConfig& ap);

struct AttentionPruneOutcome {
    RealMatrix scores;
    RealMatrix keep; // 1 where the score survived
};
AttentionPruneOutcome attention_prune_scores_with_mask(const RealMatrix& scores,
                                                       const AttentionPruneConfig& ap);

// Leaf bindings of one forward pass, for gradient readback.
struct ForwardGraph {
    ad::Node* logits = nullptr;
    std::vector<std::pair<std::string, ad::Node*>> param_leaves;

    ad::Node* leaf_of(const std::string& id) const;
};

// Builds the encoder forward graph on the tape. When masks are present,
// each masked prunable matrix enters the graph as its pruned value, so the
// leaf gradient is the loss gradient at the sparse weights.
ForwardGraph forward(ad::Tape& tape, const ModelParams& params, const MaskMap* masks,
                     const TokenBatch& batch, const AttentionPruneConfig& ap);

// Forward to logits without gradient bookkeeping kept around by the caller.
RealMatrix forward_logits(const ModelParams& params, const MaskMap* masks,
                          const TokenBatch& batch, const AttentionPruneConfig& ap);

} // namespace patprune
