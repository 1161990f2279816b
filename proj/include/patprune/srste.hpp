#pragma once

#include "patprune/matrix.hpp"

namespace patprune {

struct SrsteConfig {
    real_t lambda_w = static_cast<real_t>(2e-4); // relative weight of the sparse-refined term
    bool enabled = true;

    void validate() const {
        if (lambda_w < 0) {
            throw config_error("lambda_w must be non-negative, got " + std::to_string(lambda_w));
        }
    }
};

// Binary indicator of retained entries; the complement marks pruned ones.
struct KeepMask {
    RealMatrix mask; // entries exactly 0 or 1

    explicit KeepMask(RealMatrix m);
    KeepMask() = default;

    RealMatrix complement() const;
    int kept_count() const { return count_nonzero(mask); }
};

// W-hat = w masked to its kept entries; stands in for w in forward passes.
RealMatrix prune_forward(const RealMatrix& w, const KeepMask& km);

// One sparse-refined straight-through update:
//   w - gamma * (grad_pruned + lambda_w * (complement ⊙ w)).
// grad_pruned is the loss gradient at the masked weights; it reaches every
// entry of w, with the decay applied only to pruned entries.
RealMatrix srste_step(const RealMatrix& w, const RealMatrix& grad_pruned, const KeepMask& km,
                      real_t gamma, const SrsteConfig& cfg);

// The parenthesized term of the update alone: grad_pruned + lambda_w *
// (complement ⊙ w). Used when the step itself is delegated to a stateful
// optimizer.
RealMatrix srste_augment_gradient(const RealMatrix& w, const RealMatrix& grad_pruned,
                                  const KeepMask& km, const SrsteConfig& cfg);

} // namespace patprune
