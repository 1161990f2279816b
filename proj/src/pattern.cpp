#include "patprune/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace patprune {

void SparsityConfig::validate() const {
    if (block_rows <= 0 || block_cols <= 0) {
        throw config_error("block shape must be positive, got " + std::to_string(block_rows) +
                           "x" + std::to_string(block_cols));
    }
    if (block_size() > 64) {
        throw config_error("block size " + std::to_string(block_size()) +
                           " exceeds the supported maximum of 64 entries");
    }
    if (keep_k < 1 || keep_k > block_size()) {
        throw config_error("keep_k=" + std::to_string(keep_k) + " out of range [1, " +
                           std::to_string(block_size()) + "]");
    }
    if (pool_size < 1) {
        throw config_error("pool_size must be at least 1, got " + std::to_string(pool_size));
    }
}

SparsityConfig nm_config(int n, int m) {
    if (n < 1) throw config_error("N:M config: N must be positive, got N=" + std::to_string(n));
    if (m > n) {
        throw config_error("N:M config: M=" + std::to_string(m) + " exceeds N=" +
                           std::to_string(n));
    }
    if (m < 1) throw config_error("N:M config: M must be positive, got M=" + std::to_string(m));
    SparsityConfig cfg;
    cfg.block_rows = 1;
    cfg.block_cols = n;
    cfg.keep_k = m;
    cfg.pool_size = 1;
    cfg.mode = ProjectionMode::TopKOnly;
    cfg.validate();
    return cfg;
}

int PatternMask::popcount() const {
    int n = 0;
    for (uint8_t b : bits) n += b;
    return n;
}

uint64_t PatternMask::canonical_key() const {
    uint64_t key = 0;
    for (uint8_t b : bits) key = (key << 1) | (b ? 1u : 0u);
    return key;
}

BlockGrid partition(const RealMatrix& m, int block_rows, int block_cols) {
    if (block_rows <= 0 || block_cols <= 0) {
        throw config_error("block shape must be positive, got " + std::to_string(block_rows) +
                           "x" + std::to_string(block_cols));
    }
    if (m.rows % block_rows != 0) {
        throw config_error("matrix rows " + std::to_string(m.rows) + " not divisible by block rows " +
                           std::to_string(block_rows));
    }
    if (m.cols % block_cols != 0) {
        throw config_error("matrix cols " + std::to_string(m.cols) + " not divisible by block cols " +
                           std::to_string(block_cols));
    }
    BlockGrid g;
    g.rows_in_blocks = m.rows / block_rows;
    g.cols_in_blocks = m.cols / block_cols;
    g.block_rows = block_rows;
    g.block_cols = block_cols;
    return g;
}

BlockGrid partition(const RealMatrix& m, const SparsityConfig& cfg) {
    cfg.validate();
    return partition(m, cfg.block_rows, cfg.block_cols);
}

RealMatrix extract_block(const RealMatrix& m, const BlockGrid& g, int bi, int bj) {
    RealMatrix block(g.block_rows, g.block_cols);
    const int r0 = bi * g.block_rows, c0 = bj * g.block_cols;
    for (int r = 0; r < g.block_rows; ++r)
        for (int c = 0; c < g.block_cols; ++c) block.at(r, c) = m.at(r0 + r, c0 + c);
    return block;
}

namespace {

// Indices of the keep_k winners under cmp-priority; ties go to the smaller
// row-major index. cmp(v) is the sort key, larger wins.
template <typename KeyFn>
std::vector<int> topk_indices(const RealMatrix& block, int keep_k, KeyFn key) {
    std::vector<int> idx(block.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const real_t ka = key(block.data[a]), kb = key(block.data[b]);
        if (ka != kb) return ka > kb;
        return a < b;
    });
    idx.resize(keep_k);
    return idx;
}

PatternMask mask_from_indices(int rows, int cols, const std::vector<int>& kept) {
    PatternMask m;
    m.rows = rows;
    m.cols = cols;
    m.bits.assign(static_cast<size_t>(rows) * cols, 0);
    for (int i : kept) m.bits[i] = 1;
    return m;
}

real_t kept_energy(const RealMatrix& block, const PatternMask& mask) {
    real_t e = 0;
    for (size_t i = 0; i < block.size(); ++i) {
        if (mask.bits[i]) e += block.data[i] * block.data[i];
    }
    return e;
}

} // namespace

PatternMask block_topk_mask(const RealMatrix& block, int keep_k) {
    if (keep_k < 1 || keep_k > static_cast<int>(block.size())) {
        throw config_error("keep_k=" + std::to_string(keep_k) + " out of range [1, " +
                           std::to_string(block.size()) + "] for block " + block.shape_str());
    }
    auto kept = topk_indices(block, keep_k, [](real_t v) { return std::abs(v); });
    return mask_from_indices(block.rows, block.cols, kept);
}

PatternPool build_pattern_pool(const RealMatrix& m, const SparsityConfig& cfg) {
    const BlockGrid g = partition(m, cfg);
    std::unordered_map<uint64_t, std::pair<PatternMask, int>> freq;
    for (int bi = 0; bi < g.rows_in_blocks; ++bi) {
        for (int bj = 0; bj < g.cols_in_blocks; ++bj) {
            PatternMask mask = block_topk_mask(extract_block(m, g, bi, bj), cfg.keep_k);
            auto [it, inserted] = freq.try_emplace(mask.canonical_key(), mask, 0);
            it->second.second += 1;
        }
    }
    std::vector<std::pair<PatternMask, int>> ranked;
    ranked.reserve(freq.size());
    for (auto& [key, entry] : freq) ranked.push_back(entry);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first.canonical_key() < b.first.canonical_key();
    });
    if (static_cast<int>(ranked.size()) > cfg.pool_size) ranked.resize(cfg.pool_size);

    PatternPool pool;
    pool.masks.reserve(ranked.size());
    for (auto& [mask, count] : ranked) pool.masks.push_back(std::move(mask));
    return pool;
}

size_t match_block_to_pool(const RealMatrix& block, const PatternPool& pool) {
    if (pool.empty()) throw state_error("match_block_to_pool: empty pattern pool");
    size_t best = 0;
    real_t best_energy = kept_energy(block, pool.masks[0]);
    for (size_t i = 1; i < pool.size(); ++i) {
        if (pool.masks[i].rows != block.rows || pool.masks[i].cols != block.cols) {
            throw dimension_error("match_block_to_pool: mask " + std::to_string(i) + " is " +
                                  std::to_string(pool.masks[i].rows) + "x" +
                                  std::to_string(pool.masks[i].cols) + ", block is " +
                                  block.shape_str());
        }
        const real_t e = kept_energy(block, pool.masks[i]);
        if (e > best_energy) {
            best_energy = e;
            best = i;
        }
    }
    return best;
}

namespace {

PruneResult prune_with_selector(
    const RealMatrix& m, const SparsityConfig& cfg,
    const std::function<PatternMask(const RealMatrix&)>& select) {
    const BlockGrid g = partition(m, cfg);
    PruneResult out;
    out.pruned = zeros(m.rows, m.cols);
    out.keep_mask = zeros(m.rows, m.cols);
    for (int bi = 0; bi < g.rows_in_blocks; ++bi) {
        for (int bj = 0; bj < g.cols_in_blocks; ++bj) {
            const RealMatrix block = extract_block(m, g, bi, bj);
            const PatternMask mask = select(block);
            const int r0 = bi * g.block_rows, c0 = bj * g.block_cols;
            for (int r = 0; r < g.block_rows; ++r) {
                for (int c = 0; c < g.block_cols; ++c) {
                    if (mask.bits[static_cast<size_t>(r) * g.block_cols + c]) {
                        out.keep_mask.at(r0 + r, c0 + c) = 1;
                        out.pruned.at(r0 + r, c0 + c) = m.at(r0 + r, c0 + c);
                    }
                }
            }
        }
    }
    return out;
}

} // namespace

PruneResult pattern_prune(const RealMatrix& m, const SparsityConfig& cfg) {
    if (cfg.mode == ProjectionMode::TopKOnly) {
        return prune_with_selector(m, cfg, [&](const RealMatrix& block) {
            return block_topk_mask(block, cfg.keep_k);
        });
    }
    return pattern_prune_with_pool(m, cfg, build_pattern_pool(m, cfg));
}

PruneResult pattern_prune_with_pool(const RealMatrix& m, const SparsityConfig& cfg,
                                    const PatternPool& pool) {
    return prune_with_selector(m, cfg, [&](const RealMatrix& block) {
        return pool.masks[match_block_to_pool(block, pool)];
    });
}

} // namespace patprune
