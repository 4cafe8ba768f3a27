#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "momenta/graph.hpp"
#include "momenta/moment.hpp"
#include "momenta/representation.hpp"
#include "momenta/solver.hpp"

namespace momenta {

struct BoundOptions {
    int k_max = 2;
    int nu_max = 0;  // 0 disables the full hierarchy
    enum class Cuts { off, on, autodetect };
    Cuts cuts = Cuts::autodetect;
    int hole_max_len = 9;
    int sample_count = 200;
    std::uint64_t seed = 0;
    bool lower_bounds = true;
    double cert_tol = 1e-4;
    long long index_cap = 5000;
    SolveOptions solve;
};

struct LevelResult {
    double value = 0;
    SolveStatus status = SolveStatus::solver_failure;
    int block_size = 0;
    int iterations = 0;
    std::string error;

    bool usable() const {
        return error.empty() &&
               (status == SolveStatus::optimal || status == SolveStatus::near_optimal);
    }
};

struct BoundReport {
    std::string id;
    std::string input;
    int n = 0;
    int d = 2;
    bool alpha_available = false;
    IndependenceCertificate alpha;
    double sampled_value = 0;
    double polished_value = 0;
    bool sampling_available = false;
    std::string sampling_note;
    double lower_bound = 0;
    std::map<int, LevelResult> theta;
    std::map<int, LevelResult> theta_cut;
    std::map<int, LevelResult> nu;
    std::vector<OddHole> cuts_applied;
    bool rank_available = false;
    RankReport rank;
    std::string certified = "none";
    double beta_lb = 0;
    double beta_ub = 0;
    double uncertainty_constant = 0;
    int embedded_block = 0;  // real block size handed to the solver
};

/// Uncertainty constant: n - beta_ub, floored at zero.
inline double uncertainty_constant(const CommutationGraph& g, double upper_bound) {
    if (upper_bound < 0) throw std::invalid_argument("upper bound must be non-negative");
    return std::max(0.0, static_cast<double>(g.size()) - upper_bound);
}

namespace detail {

struct SolvedLevel {
    LevelResult result;
    std::optional<SdpSolution> solution;
};

inline SolvedLevel solve_moment_relaxation(const CommutationGraph& g, const IndexSet& idx,
                                           const std::vector<OddHole>& cuts,
                                           const SolveOptions& opts) {
    SolvedLevel lv;
    try {
        SdpProblem prob = assemble(build_layout(idx, g));
        add_odd_hole_cuts(prob, cuts);
        SdpSolution sol = solve(prob, opts);
        lv.result.value = sol.primal_value;
        lv.result.status = sol.status;
        lv.result.block_size = prob.moment_block_size();
        lv.result.iterations = sol.iterations;
        if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::near_optimal)
            lv.result.error = sol.message.empty() ? to_string(sol.status) : sol.message;
        lv.solution = std::move(sol);
    } catch (const std::exception& ex) {
        lv.result.error = ex.what();
    }
    return lv;
}

}  // namespace detail

/// Level-k Lovasz-type bound; with cuts=true every enumerated odd
/// hole H adds sum_{i in H} |<a_i>|^2 <= floor(|H|/2).
inline double theta(const CommutationGraph& g, int k, bool cuts = false,
                    const BoundOptions& opts = {}) {
    std::vector<OddHole> holes;
    if (cuts) {
        if (g.phase_order() != 2)
            throw std::invalid_argument("odd-hole cuts apply to d=2 graphs only");
        int max_len = std::min(g.size(), opts.hole_max_len);
        if (max_len % 2 == 0) --max_len;
        if (max_len >= 5) holes = enumerate_odd_holes(g, max_len);
    }
    auto lv = detail::solve_moment_relaxation(g, build_theta_index_set(g, k), holes, opts.solve);
    if (!lv.result.usable()) throw std::runtime_error("theta solve failed: " + lv.result.error);
    return lv.result.value;
}

/// Full state-polynomial level over all monomials of degree <= l.
inline double nu(const CommutationGraph& g, int level, const BoundOptions& opts = {}) {
    auto lv = detail::solve_moment_relaxation(g, build_full_index_set(g, level, opts.index_cap), {},
                                              opts.solve);
    if (!lv.result.usable()) throw std::runtime_error("nu solve failed: " + lv.result.error);
    return lv.result.value;
}

/// Independent Lovasz oracle (trace-normalized form): max sum_ij M_ij subject to
/// tr M = 1, M_ij = 0 on edges, M >= 0.  Built directly, bypassing the moment
/// pipeline; the trace constraint is eliminated by substitution into the last
/// diagonal entry.
inline double lovasz_reference(const CommutationGraph& g, const SolveOptions& opts = {}) {
    if (g.phase_order() != 2) throw std::invalid_argument("lovasz_reference is defined for d=2");
    const int n = g.size();
    if (n == 0) return 0;

    SdpProblem p;
    SdpProblem::Block blk;
    blk.size = n;
    blk.entries.assign(static_cast<size_t>(n) * n, RealEntry{});
    p.objective_constant = 1.0;

    auto var = [&p](double coef) {
        p.objective.push_back(coef);
        return p.nvars++;
    };
    blk.at(n - 1, n - 1).constant = 1.0;
    for (int i = 0; i + 1 < n; ++i) {
        const int v = var(0.0);  // diagonal mass, objective-neutral
        blk.at(i, i).terms.push_back({v, 1.0});
        blk.at(n - 1, n - 1).terms.push_back({v, -1.0});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!g.edge(i, j)) {
                const int v = var(2.0);
                blk.at(i, j).terms.push_back({v, 1.0});
                blk.at(j, i).terms.push_back({v, 1.0});
            }
    p.blocks.push_back(std::move(blk));

    SdpSolution sol = solve(p, opts);
    if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::near_optimal)
        throw std::runtime_error("lovasz_reference solve failed");
    return sol.primal_value;
}

/// Lower bounds from an explicit realization: Haar sampling plus see-saw
/// polishing, seeded both from the best sample and (for d=2) from a joint
/// eigenstate of the independence witness.
struct LowerBoundResult {
    double sampled = 0;
    double polished = 0;
    StateVector best_state;
};

inline LowerBoundResult sample_lower_bound(const CommutationGraph& g,
                                           const IndependenceCertificate& alpha,
                                           int sample_count, std::uint64_t seed,
                                           int seesaw_iters = 300, double seesaw_tol = 1e-11) {
    const std::vector<WeylString> strings = realize_graph(g);
    const std::int64_t dim = strings.empty() ? 1 : strings[0].dim();

    LowerBoundResult out;
    StateVector best;
    for (const StateVector& psi : haar_sample(dim, sample_count, seed)) {
        const double v = objective_value(strings, psi);
        if (best.size() == 0 || v > out.sampled) {
            out.sampled = v;
            best = psi;
        }
    }
    if (best.size() == 0) best = haar_sample(dim, 1, seed)[0];

    SeesawResult polished = seesaw_polish(strings, best, seesaw_iters, seesaw_tol);
    out.polished = polished.value;
    out.best_state = polished.state;

    if (g.phase_order() == 2 && !alpha.witness.empty()) {
        const StateVector seed_state = joint_eigenstate(strings, alpha.witness);
        SeesawResult from_witness = seesaw_polish(strings, seed_state, seesaw_iters, seesaw_tol);
        if (from_witness.value > out.polished) {
            out.polished = from_witness.value;
            out.best_state = from_witness.state;
        }
    }
    return out;
}

/// Full certified report: alpha, sampled/see-saw lower bounds, the theta
/// ladder with optional hole cuts, nu levels, rank-loop analysis, and the
/// uncertainty constant n - beta_ub.
inline BoundReport full_report(const CommutationGraph& g, const BoundOptions& opts = {}) {
    BoundReport rep;
    rep.n = g.size();
    rep.d = g.phase_order();

    if (g.size() <= 64) {
        rep.alpha = independence_number(g);
        rep.alpha_available = true;
    }

    // Cuts: default on for d=2 when holes exist, never for d>2.
    std::vector<OddHole> holes;
    if (g.phase_order() == 2 && opts.cuts != BoundOptions::Cuts::off) {
        int max_len = std::min(g.size(), opts.hole_max_len);
        if (max_len % 2 == 0) --max_len;
        if (max_len >= 5) holes = enumerate_odd_holes(g, max_len);
    }
    const bool use_cuts = opts.cuts == BoundOptions::Cuts::on
                              ? true
                              : (opts.cuts == BoundOptions::Cuts::autodetect && !holes.empty());

    std::optional<SdpSolution> prev_theta, last_theta;
    const int k_top = std::min(opts.k_max, std::max(1, g.size()));
    for (int k = 1; k <= k_top; ++k) {
        detail::SolvedLevel lv;
        try {
            const IndexSet idx = build_theta_index_set(g, k);
            lv = detail::solve_moment_relaxation(g, idx, {}, opts.solve);
            if (use_cuts && !holes.empty())
                rep.theta_cut[k] = detail::solve_moment_relaxation(g, idx, holes, opts.solve).result;
        } catch (const std::exception& ex) {
            lv.result.error = ex.what();
        }
        rep.theta[k] = lv.result;
        rep.embedded_block = std::max(rep.embedded_block, lv.result.block_size);
        prev_theta = std::move(last_theta);
        last_theta = std::move(lv.solution);
    }
    if (use_cuts) rep.cuts_applied = holes;

    std::optional<SdpSolution> prev_nu, last_nu;
    for (int l = 1; l <= opts.nu_max; ++l) {
        detail::SolvedLevel lv;
        try {
            lv = detail::solve_moment_relaxation(g, build_full_index_set(g, l, opts.index_cap), {},
                                                 opts.solve);
        } catch (const std::exception& ex) {
            lv.result.error = ex.what();
        }
        rep.nu[l] = lv.result;
        prev_nu = std::move(last_nu);
        last_nu = std::move(lv.solution);
    }

    // Flat-extension check on the deepest consecutive solved pair.
    auto try_rank = [&](const std::optional<SdpSolution>& inner,
                        const std::optional<SdpSolution>& outer) {
        if (!rep.rank_available && inner && outer && inner->matrix.rows() > 0 &&
            outer->matrix.rows() >= inner->matrix.rows()) {
            rep.rank = rank_analysis(*inner, *outer, opts.solve.rank_tol);
            rep.rank_available = true;
        }
    };
    try_rank(prev_nu, last_nu);
    try_rank(prev_theta, last_theta);

    // Lower bounds.
    rep.lower_bound = rep.alpha_available ? rep.alpha.size : 0;
    if (opts.lower_bounds) {
        try {
            const LowerBoundResult lb =
                sample_lower_bound(g, rep.alpha, opts.sample_count, opts.seed);
            rep.sampled_value = lb.sampled;
            rep.polished_value = lb.polished;
            rep.sampling_available = true;
            rep.lower_bound = std::max(rep.lower_bound, lb.polished);
        } catch (const DimensionCapError& ex) {
            rep.sampling_note = ex.what();
        }
    }

    // Upper bound: best usable level.
    double ub = std::numeric_limits<double>::infinity();
    for (const auto& [k, lv] : rep.theta)
        if (lv.usable()) ub = std::min(ub, lv.value);
    for (const auto& [k, lv] : rep.theta_cut)
        if (lv.usable()) ub = std::min(ub, lv.value);
    for (const auto& [l, lv] : rep.nu)
        if (lv.usable()) ub = std::min(ub, lv.value);
    rep.beta_lb = rep.lower_bound;
    rep.beta_ub = std::isfinite(ub) ? ub : static_cast<double>(g.size());

    if (rep.alpha_available && rep.beta_ub - rep.alpha.size <= opts.cert_tol)
        rep.certified = "alpha_match";
    else if (rep.rank_available && rep.rank.loop_detected)
        rep.certified = "rank_loop";
    rep.uncertainty_constant = uncertainty_constant(g, std::max(0.0, rep.beta_ub));
    return rep;
}

}  // namespace momenta
