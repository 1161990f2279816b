#include "patprune/admm.hpp"

#include <cmath>
#include <fstream>

namespace patprune {

AdmmState init_state(const RealMatrix& w, const SparsityConfig& cfg, real_t rho,
                     std::string target_id) {
    if (rho <= 0) {
        throw config_error("rho must be positive, got " + std::to_string(rho));
    }
    cfg.validate();
    AdmmState st;
    st.target_id = std::move(target_id);
    st.Z = zeros(w.rows, w.cols);
    st.U = zeros(w.rows, w.cols);
    st.rho = rho;
    st.iteration_k = 0;
    st.cfg = cfg;
    return st;
}

bool is_feasible(const RealMatrix& w, const SparsityConfig& cfg) {
    const BlockGrid g = partition(w, cfg);
    std::vector<PatternMask> supports;
    supports.reserve(static_cast<size_t>(g.n_blocks()));
    for (int bi = 0; bi < g.rows_in_blocks; ++bi) {
        for (int bj = 0; bj < g.cols_in_blocks; ++bj) {
            const RealMatrix block = extract_block(w, g, bi, bj);
            PatternMask supp;
            supp.rows = g.block_rows;
            supp.cols = g.block_cols;
            supp.bits.resize(block.size());
            int nnz = 0;
            for (size_t i = 0; i < block.size(); ++i) {
                supp.bits[i] = block.data[i] != 0;
                nnz += supp.bits[i];
            }
            if (nnz > cfg.keep_k) return false;
            supports.push_back(std::move(supp));
        }
    }
    if (cfg.mode == ProjectionMode::TopKOnly) return true;

    const PatternPool pool = build_pattern_pool(w, cfg);
    for (const PatternMask& supp : supports) {
        bool covered = false;
        for (const PatternMask& mask : pool.masks) {
            bool contained = true;
            for (size_t i = 0; i < supp.bits.size(); ++i) {
                if (supp.bits[i] && !mask.bits[i]) {
                    contained = false;
                    break;
                }
            }
            if (contained) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

PenaltyResult penalty(const RealMatrix& w, const AdmmState& st) {
    require_same_shape(w, st.Z, "penalty");
    require_same_shape(w, st.U, "penalty");
    PenaltyResult out;
    out.gradient = RealMatrix(w.rows, w.cols);
    real_t sq = 0;
    for (size_t i = 0; i < w.size(); ++i) {
        const real_t r = w.data[i] - st.Z.data[i] + st.U.data[i];
        sq += r * r;
        out.gradient.data[i] = st.rho * r;
    }
    out.value = static_cast<real_t>(0.5) * st.rho * sq;
    return out;
}

RealMatrix project(const RealMatrix& v, const SparsityConfig& cfg) {
    return pattern_prune(v, cfg).pruned;
}

void project_state(AdmmState& st, const RealMatrix& w, bool freeze_pool) {
    require_same_shape(w, st.Z, "project_state");
    const RealMatrix v = add(w, st.U);
    if (st.cfg.mode == ProjectionMode::PoolConstrained && freeze_pool) {
        if (!st.frozen_pool) st.frozen_pool = build_pattern_pool(v, st.cfg);
        st.Z = pattern_prune_with_pool(v, st.cfg, *st.frozen_pool).pruned;
        return;
    }
    st.Z = project(v, st.cfg);
}

void dual_update(AdmmState& st, const RealMatrix& w) {
    require_same_shape(w, st.U, "dual_update");
    require_same_shape(w, st.Z, "dual_update");
    for (size_t i = 0; i < w.size(); ++i) {
        st.U.data[i] += w.data[i] - st.Z.data[i];
    }
    st.iteration_k += 1;
}

void admm_iterate(const AdmmProblem& problem, std::vector<AdmmState>& states, int iterations,
                  AdmmReport& report) {
    for (int it = 0; it < iterations; ++it) {
        problem.solve_w_subproblem();

        double primal_sq = 0, weight_sq = 0, penalty_sum = 0;
        for (size_t s = 0; s < states.size(); ++s) {
            const RealMatrix& w = problem.weight_of(s);
            project_state(states[s], w, problem.freeze_pool);
            dual_update(states[s], w);
            primal_sq += frobenius_sq(sub(w, states[s].Z));
            weight_sq += frobenius_sq(w);
            penalty_sum += penalty(w, states[s]).value;
        }
        AdmmIterationRecord rec;
        rec.iteration_k = it + 1;
        rec.primal_residual = std::sqrt(primal_sq);
        rec.relative_residual = rec.primal_residual / std::max(std::sqrt(weight_sq), 1e-300);
        rec.penalty_value = penalty_sum;
        rec.task_loss = problem.task_loss ? problem.task_loss() : 0.0;
        if (!std::isfinite(rec.task_loss) || !std::isfinite(rec.penalty_value)) {
            throw numeric_error("admm_iterate: non-finite loss at iteration " +
                                std::to_string(rec.iteration_k));
        }
        report.records.push_back(rec);
    }
}

void save_admm_report(const AdmmReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "patprune-admm-report v1\n";
    out.precision(17);
    for (const AdmmIterationRecord& r : report.records) {
        out << "iteration=" << r.iteration_k << "\tprimal_residual=" << r.primal_residual
            << "\trelative_residual=" << r.relative_residual << "\tpenalty=" << r.penalty_value
            << "\ttask_loss=" << r.task_loss << "\n";
    }
}

} // namespace patprune
