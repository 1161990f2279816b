#include "patprune/srste.hpp"

namespace patprune {

KeepMask::KeepMask(RealMatrix m) : mask(std::move(m)) {
    for (real_t v : mask.data) {
        if (v != 0 && v != 1) {
            throw input_error("keep mask entries must be exactly 0 or 1");
        }
    }
}

RealMatrix KeepMask::complement() const {
    RealMatrix out = mask;
    for (real_t& v : out.data) v = 1 - v;
    return out;
}

RealMatrix prune_forward(const RealMatrix& w, const KeepMask& km) {
    require_same_shape(w, km.mask, "prune_forward");
    return hadamard(w, km.mask);
}

RealMatrix srste_augment_gradient(const RealMatrix& w, const RealMatrix& grad_pruned,
                                  const KeepMask& km, const SrsteConfig& cfg) {
    require_same_shape(w, grad_pruned, "srste_augment_gradient");
    require_same_shape(w, km.mask, "srste_augment_gradient");
    cfg.validate();
    RealMatrix g = grad_pruned;
    if (cfg.lambda_w != 0) {
        for (size_t i = 0; i < g.size(); ++i) {
            g.data[i] += cfg.lambda_w * (1 - km.mask.data[i]) * w.data[i];
        }
    }
    return g;
}

RealMatrix srste_step(const RealMatrix& w, const RealMatrix& grad_pruned, const KeepMask& km,
                      real_t gamma, const SrsteConfig& cfg) {
    if (gamma <= 0) {
        throw config_error("srste_step: gamma must be positive, got " + std::to_string(gamma));
    }
    const RealMatrix g = srste_augment_gradient(w, grad_pruned, km, cfg);
    RealMatrix out = w;
    axpy(out, -gamma, g);
    return out;
}

} // namespace patprune
