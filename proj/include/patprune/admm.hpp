#pragma once

#include "patprune/pattern.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace patprune {

// Per-matrix ADMM record: auxiliary variable Z, scaled dual U, penalty
// weight rho and the iteration counter.
struct AdmmState {
    std::string target_id;
    RealMatrix Z;
    RealMatrix U;
    real_t rho = static_cast<real_t>(0.01);
    int iteration_k = 0;
    SparsityConfig cfg;
    // Set on first projection when cfg.mode is PoolConstrained and the
    // frozen-pool ablation is active.
    std::optional<PatternPool> frozen_pool;
};

struct AdmmIterationRecord {
    int iteration_k = 0;
    double primal_residual = 0;   // ||W - Z||_F aggregated over states
    double relative_residual = 0; // primal / ||W||_F
    double penalty_value = 0;     // sum of (rho/2) ||W - Z + U||_F^2
    double task_loss = 0;
};

struct AdmmReport {
    std::vector<AdmmIterationRecord> records;
};

struct PenaltyResult {
    real_t value;
    RealMatrix gradient;
};

// Z = U = 0 of w's shape, iteration 0.
AdmmState init_state(const RealMatrix& w, const SparsityConfig& cfg, real_t rho,
                     std::string target_id = {});

// Membership in the admissible set: every block carries at most keep_k
// nonzeros and, under PoolConstrained, each block's support lies inside
// some mask of the matrix's own pool.
bool is_feasible(const RealMatrix& w, const SparsityConfig& cfg);

// (rho/2) ||w - Z + U||_F^2 and its gradient rho (w - Z + U); the value is
// added to the task loss for the W-subproblem.
PenaltyResult penalty(const RealMatrix& w, const AdmmState& st);

// Euclidean projection onto the admissible set: pattern pruning of v.
RealMatrix project(const RealMatrix& v, const SparsityConfig& cfg);

// Projection step for a state: Z <- project(W + U). Under the frozen-pool
// ablation the pool is built once and reused.
void project_state(AdmmState& st, const RealMatrix& w, bool freeze_pool = false);

// U <- U + w - Z, iteration counter incremented.
void dual_update(AdmmState& st, const RealMatrix& w);

// One optimization problem bound to a set of states: the W-subproblem
// minimizes task loss + sum of penalties over the model parameters, and
// current weights are read back per state between iterations.
struct AdmmProblem {
    std::function<void()> solve_w_subproblem;
    std::function<const RealMatrix&(size_t state_index)> weight_of;
    std::function<double()> task_loss;
    bool freeze_pool = false;
};

// Runs `iterations` rounds of subproblem / projection / dual update and
// reports residuals per round. Non-finite losses abort with the report
// accumulated so far left in `report`.
void admm_iterate(const AdmmProblem& problem, std::vector<AdmmState>& states, int iterations,
                  AdmmReport& report);

void save_admm_report(const AdmmReport& report, const std::string& path);

} // namespace patprune
