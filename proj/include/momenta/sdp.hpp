#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "momenta/graph.hpp"
#include "momenta/moment.hpp"

namespace momenta {

/// Standard-form problem: maximize obj.x subject to
/// F0_b + sum_j x_j Fj_b >= 0 for every block (entries hold the linear forms).
struct SdpProblem {
    struct Block {
        int size = 0;
        std::vector<RealEntry> entries;  // size*size, row-major, symmetric

        const RealEntry& at(int r, int c) const { return entries[static_cast<size_t>(r) * size + c]; }
        RealEntry& at(int r, int c) { return entries[static_cast<size_t>(r) * size + c]; }
    };
    std::vector<Block> blocks;
    int nvars = 0;
    std::vector<double> objective;            // per variable, maximized
    double objective_constant = 0;
    std::vector<RealTerm> operator_objective;  // per operator: its |<a_i>|^2 variable

    int moment_block_size() const { return blocks.empty() ? 0 : blocks[0].size; }
};

enum class SolveStatus { optimal, near_optimal, infeasible, unbounded, solver_failure };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::near_optimal: return "near_optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        default: return "solver_failure";
    }
}

struct SolveOptions {
    double gap_tol = 1e-7;
    double psd_tol = 1e-8;
    double rank_tol = 1e-6;   // relative, for rank reports
    double feas_tol = 1e-7;   // relative residual tolerance
    int max_iter = 250;
    int block_cap = 2048;
    std::string backend = "native";
};

struct SdpSolution {
    SolveStatus status = SolveStatus::solver_failure;
    double primal_value = 0;  // objective of the maximization
    double dual_value = 0;    // certified upper estimate
    double gap = 0;           // |primal-dual| / max(1, |primal|)
    Eigen::MatrixXd matrix;   // moment block at the solution
    double min_eigenvalue = 0;
    int iterations = 0;
    std::vector<double> x;
    std::string message;
};

struct RankReport {
    std::vector<double> outer_singular_values;
    std::vector<double> inner_singular_values;
    int outer_rank = 0;
    int inner_rank = 0;
    bool loop_detected = false;
};

/// Build the one-block problem from a layout's real form.
inline SdpProblem assemble(const RealLayout& rl) {
    SdpProblem p;
    p.nvars = rl.nvars;
    SdpProblem::Block blk;
    blk.size = rl.size;
    blk.entries = rl.entries;
    p.blocks.push_back(std::move(blk));
    p.objective.assign(p.nvars, 0.0);
    for (const RealTerm& t : rl.objective) p.objective[t.var] += t.coef;
    p.operator_objective = rl.objective;
    return p;
}

inline SdpProblem assemble(const MomentLayout& layout) { return assemble(realize_layout(layout)); }

/// Append one half-plane sum_{i in H} |<a_i>|^2 <= floor(|H|/2) as a 1x1
/// slack block.
inline void add_odd_hole_cuts(SdpProblem& p, const std::vector<OddHole>& holes) {
    for (const OddHole& h : holes) {
        SdpProblem::Block blk;
        blk.size = 1;
        RealEntry e;
        e.constant = static_cast<double>(h.rhs());
        for (int v : h.vertices) {
            if (v < 0 || v >= static_cast<int>(p.operator_objective.size()))
                throw std::invalid_argument("hole vertex outside problem");
            const RealTerm& t = p.operator_objective[v];
            e.terms.push_back({t.var, -t.coef});
        }
        blk.entries.push_back(std::move(e));
        p.blocks.push_back(std::move(blk));
    }
}

/// SDPA sparse export (.dat-s).  The file encodes the equivalent minimization
/// min (-obj).x with X = sum_j x_j F_j - F0 >= 0, so external optima equal
/// the negated value of this problem.  17 significant digits, 1x1 cut blocks
/// are written as diagonal blocks.
inline std::string export_sdpa(const SdpProblem& p) {
    std::ostringstream out;
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "\"momenta moment relaxation\n";
    if (p.objective_constant != 0)
        out << "\"objective constant " << fmt(p.objective_constant) << " not representable in SDPA\n";
    out << p.nvars << " = mDIM\n";
    out << p.blocks.size() << " = nBLOCK\n";
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        if (b) out << " ";
        out << (p.blocks[b].size == 1 ? -1 : p.blocks[b].size);
    }
    out << " = bLOCKsTRUCT\n";
    for (int j = 0; j < p.nvars; ++j) out << (j ? " " : "") << fmt(-p.objective[j]);
    out << "\n";
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        const auto& blk = p.blocks[b];
        for (int r = 0; r < blk.size; ++r)
            for (int c = r; c < blk.size; ++c) {
                const RealEntry& e = blk.at(r, c);
                if (e.constant != 0)
                    out << "0 " << b + 1 << " " << r + 1 << " " << c + 1 << " " << fmt(-e.constant) << "\n";
                for (const RealTerm& t : e.terms)
                    if (t.coef != 0)
                        out << t.var + 1 << " " << b + 1 << " " << r + 1 << " " << c + 1 << " "
                            << fmt(t.coef) << "\n";
            }
    }
    return out.str();
}

inline int numerical_rank(const Eigen::MatrixXd& m, double rank_tol,
                          std::vector<double>* singular_values = nullptr) {
    if (m.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                      Eigen::EigenvaluesOnly);
    std::vector<double> sv;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        sv.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(sv.rbegin(), sv.rend());
    const double cutoff = rank_tol * std::max(sv.empty() ? 0.0 : sv[0], 1e-300);
    int rank = 0;
    while (rank < static_cast<int>(sv.size()) && sv[rank] > cutoff) ++rank;
    if (singular_values) *singular_values = std::move(sv);
    return rank;
}

/// Flat-extension check: compare the rank of the outer optimal moment matrix
/// with the rank of its principal submatrix on the inner (prefix) index set.
inline RankReport rank_analysis(const SdpSolution& inner, const SdpSolution& outer,
                                double rank_tol = 1e-6) {
    const Eigen::Index mi = inner.matrix.rows();
    const Eigen::Index mo = outer.matrix.rows();
    if (mi > mo) throw std::invalid_argument("rank_analysis: inner set larger than outer");
    RankReport rep;
    rep.outer_rank = numerical_rank(outer.matrix, rank_tol, &rep.outer_singular_values);
    rep.inner_rank =
        numerical_rank(outer.matrix.topLeftCorner(mi, mi), rank_tol, &rep.inner_singular_values);
    rep.loop_detected = (rep.outer_rank == rep.inner_rank);
    return rep;
}

}  // namespace momenta
