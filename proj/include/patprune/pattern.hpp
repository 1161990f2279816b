#pragma once

#include "patprune/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace patprune {

enum class ProjectionMode {
    PoolConstrained, // per-block mask drawn from the matrix's pattern pool
    TopKOnly,        // per-block independent top-k mask
};

// Parameterization of the admissible sparse set: p_r x p_c blocks keeping
// keep_k entries each, optionally constrained to a pool of at most
// pool_size masks. Rectangular blocks exist for the N:M degenerate case;
// the square path is the default.
struct SparsityConfig {
    int block_rows = 4;
    int block_cols = 4;
    int keep_k = 8;
    int pool_size = 32;
    ProjectionMode mode = ProjectionMode::PoolConstrained;

    int block_size() const { return block_rows * block_cols; }
    void validate() const;
};

// N:M degenerate configuration: 1xN runs keeping the M largest entries.
SparsityConfig nm_config(int n, int m);

// Binary mask over one block with exactly keep_k set bits.
struct PatternMask {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> bits; // row-major, 0/1

    int popcount() const;
    // Bits read MSB-first as a row-major binary number; total order for
    // tie-breaking and equality.
    uint64_t canonical_key() const;
    bool operator==(const PatternMask& o) const { return rows == o.rows && cols == o.cols && bits == o.bits; }
};

// Ordered set of distinct masks admissible for one matrix, most frequent
// first (frequency ties resolved toward the smaller canonical key).
struct PatternPool {
    std::vector<PatternMask> masks;
    std::string source; // which matrix / stage produced it

    bool empty() const { return masks.empty(); }
    size_t size() const { return masks.size(); }
};

struct BlockGrid {
    int rows_in_blocks = 0;
    int cols_in_blocks = 0;
    int block_rows = 0;
    int block_cols = 0;

    int n_blocks() const { return rows_in_blocks * cols_in_blocks; }
};

struct PruneResult {
    RealMatrix pruned;
    RealMatrix keep_mask; // entries exactly 0 or 1
};

// Tile m into non-overlapping block_rows x block_cols blocks; dimensions
// must divide exactly.
BlockGrid partition(const RealMatrix& m, int block_rows, int block_cols);
inline BlockGrid partition(const RealMatrix& m, int p) { return partition(m, p, p); }
BlockGrid partition(const RealMatrix& m, const SparsityConfig& cfg);

// Copy block (bi, bj) of m into a block_rows x block_cols matrix.
RealMatrix extract_block(const RealMatrix& m, const BlockGrid& g, int bi, int bj);

// Mask keeping the keep_k entries of largest magnitude; magnitude ties go
// to the smaller row-major index.
PatternMask block_topk_mask(const RealMatrix& block, int keep_k);

// Per-block top-k masks counted by frequency; the pool_size most frequent
// survive (all of them when fewer exist).
PatternPool build_pattern_pool(const RealMatrix& m, const SparsityConfig& cfg);

// Index of the pool mask retaining the most energy (sum of squared kept
// entries), equivalently the Frobenius-nearest masked block. Ties go to
// the smaller index.
size_t match_block_to_pool(const RealMatrix& block, const PatternPool& pool);

// Full pattern pruning of a matrix under cfg. PoolConstrained builds the
// pool from m itself; TopKOnly uses each block's own mask.
PruneResult pattern_prune(const RealMatrix& m, const SparsityConfig& cfg);

// Same, but against a caller-supplied pool (frozen-pool ablation).
PruneResult pattern_prune_with_pool(const RealMatrix& m, const SparsityConfig& cfg,
                                    const PatternPool& pool);

} // namespace patprune
