#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "momenta/moment.hpp"
#include "momenta/representation.hpp"
#include "momenta/solver.hpp"
#include "sdpa_reader.hpp"
#include "test_util.hpp"

using namespace momenta;
using namespace testutil;

namespace {

SdpProblem theta_problem(const CommutationGraph& g, int k) {
    return assemble(build_layout(build_theta_index_set(g, k), g));
}

/// Rebuild our maximization problem from an independently parsed export.
SdpProblem problem_from_sdpa(const sdpa_reader::File& f) {
    const auto dense = sdpa_reader::densify(f);
    SdpProblem p;
    p.nvars = f.mdim;
    for (double c : f.c) p.objective.push_back(-c);
    for (int b = 0; b < f.nblock; ++b) {
        SdpProblem::Block blk;
        blk.size = dense.sizes[b];
        blk.entries.assign(static_cast<size_t>(blk.size) * blk.size, RealEntry{});
        for (int r = 0; r < blk.size; ++r)
            for (int c = 0; c < blk.size; ++c) {
                RealEntry& e = blk.at(r, c);
                e.constant = -dense.mats[0][b][static_cast<size_t>(r) * blk.size + c];
                for (int j = 1; j <= f.mdim; ++j) {
                    const double v = dense.mats[j][b][static_cast<size_t>(r) * blk.size + c];
                    if (v != 0) e.terms.push_back({j - 1, v});
                }
            }
        p.blocks.push_back(std::move(blk));
    }
    return p;
}

Eigen::MatrixXd dense_of(const SdpProblem::Block& blk, int var, int nvars) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(blk.size, blk.size);
    for (int r = 0; r < blk.size; ++r)
        for (int c = 0; c < blk.size; ++c) {
            const RealEntry& e = blk.at(r, c);
            if (var < 0) {
                m(r, c) = e.constant;
            } else {
                for (const RealTerm& t : e.terms)
                    if (t.var == var) m(r, c) += t.coef;
            }
        }
    (void)nvars;
    return m;
}

}  // namespace

TEST_CASE("assemble: stated examples") {
    auto p5 = theta_problem(cycle_graph(5), 1);
    CHECK(p5.moment_block_size() == 6);
    CHECK(p5.nvars == 10);
    CHECK(p5.blocks[0].at(0, 0).constant == 1.0);
    int pinned_zero_offdiag = 0;
    for (int i = 1; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            if (p5.blocks[0].at(i, j).terms.empty()) ++pinned_zero_offdiag;
    CHECK(pinned_zero_offdiag == 5);

    auto p1 = theta_problem(CommutationGraph::empty(1), 1);
    CHECK(p1.moment_block_size() == 2);
    auto s1 = solve(p1);
    CHECK(s1.status == SolveStatus::optimal);
    CHECK(s1.primal_value == doctest::Approx(1.0).epsilon(1e-6));

    auto s3 = solve(theta_problem(CommutationGraph::empty(3), 1));
    CHECK(s3.primal_value == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("solve: known closed-form values") {
    auto c5 = solve(theta_problem(cycle_graph(5), 1));
    CHECK(c5.status == SolveStatus::optimal);
    CHECK(c5.primal_value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-5));

    auto k3 = solve(theta_problem(complete_graph(3), 1));
    CHECK(k3.primal_value == doctest::Approx(1.0).epsilon(1e-6));

    auto t2 = solve(theta_problem(pentagon_hub_graph(2), 1));
    CHECK(t2.primal_value == doctest::Approx(3.2361).epsilon(1e-3));
}

TEST_CASE("solution invariants: weak duality, PSD floor, determinism") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_graph(3 + static_cast<int>(rng() % 4), rng);
        auto p = theta_problem(g, 1 + static_cast<int>(rng() % 2));
        auto s = solve(p);
        REQUIRE(s.status == SolveStatus::optimal);
        CHECK(s.dual_value >= s.primal_value - 1e-7 * std::max(1.0, std::abs(s.primal_value)));
        CHECK(s.min_eigenvalue >= -1e-8);
        CHECK(s.gap <= 1e-7);
        auto s2 = solve(p);
        CHECK(s.primal_value == s2.primal_value);  // bitwise deterministic
    }
}

TEST_CASE("feasible states never beat the relaxation") {
    auto g = cycle_graph(5);
    const auto strings = realize_graph(g);
    const double t1 = solve(theta_problem(g, 1)).primal_value;
    for (const auto& psi : haar_sample(32, 50, 4)) {
        CHECK(objective_value(strings, psi) <= t1 + 1e-6);
    }
}

TEST_CASE("solver handles pinned-only problems and unknown backends") {
    SdpProblem p;
    SdpProblem::Block blk;
    blk.size = 1;
    RealEntry e;
    e.constant = 1.0;
    blk.entries.push_back(e);
    p.blocks.push_back(blk);
    auto s = solve(p);
    CHECK(s.status == SolveStatus::optimal);
    CHECK(s.matrix(0, 0) == 1.0);

    SolveOptions bad;
    bad.backend = "no-such-backend";
    CHECK_THROWS_AS(solve(p, bad), std::invalid_argument);
}

TEST_CASE("export_sdpa: well-formed minimal file") {
    SdpProblem p;
    SdpProblem::Block blk;
    blk.size = 1;
    RealEntry e;
    e.constant = 1.0;
    blk.entries.push_back(e);
    p.blocks.push_back(blk);
    const std::string text = export_sdpa(p);
    auto f = sdpa_reader::parse(text);
    CHECK(f.mdim == 0);
    CHECK(f.nblock == 1);
    CHECK(f.block_struct == std::vector<int>{-1});
    REQUIRE(f.entries.size() == 1);
    CHECK(f.entries[0].matno == 0);
    CHECK(f.entries[0].value == -1.0);  // F0 = -constant part
}

TEST_CASE("export_sdpa round-trips coefficient-exactly") {
    auto g = cycle_graph(5);
    auto p = theta_problem(g, 1);
    const std::string text = export_sdpa(p);
    CHECK(text == export_sdpa(p));  // deterministic bytes
    auto back = problem_from_sdpa(sdpa_reader::parse(text));
    REQUIRE(back.nvars == p.nvars);
    REQUIRE(back.blocks.size() == p.blocks.size());
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        for (int j = -1; j < p.nvars; ++j) {
            const Eigen::MatrixXd ours = dense_of(p.blocks[b], j, p.nvars);
            const Eigen::MatrixXd theirs = dense_of(back.blocks[b], j, p.nvars);
            CHECK((ours - theirs).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    for (int j = 0; j < p.nvars; ++j) CHECK(back.objective[j] == p.objective[j]);
}

TEST_CASE("theta2(C5) export solved from the re-parsed file") {
    auto p = theta_problem(cycle_graph(5), 2);
    auto back = problem_from_sdpa(sdpa_reader::parse(export_sdpa(p)));
    auto sol = solve(back);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.primal_value == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("export handles cut blocks as diagonal blocks") {
    auto g = cycle_graph(5);
    auto p = theta_problem(g, 1);
    add_odd_hole_cuts(p, enumerate_odd_holes(g, 9));
    REQUIRE(p.blocks.size() == 2);
    auto f = sdpa_reader::parse(export_sdpa(p));
    CHECK(f.nblock == 2);
    CHECK(f.block_struct[1] == -1);
    auto sol = solve(problem_from_sdpa(f));
    CHECK(sol.primal_value == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("rank analysis") {
    auto g = cycle_graph(5);
    auto s1 = solve(theta_problem(g, 1));
    auto s2 = solve(theta_problem(g, 2));

    // identical problems: trivially a rank loop
    auto same = rank_analysis(s1, s1);
    CHECK(same.loop_detected);
    CHECK(same.outer_rank == same.inner_rank);

    // a joint eigenstate of an independent pair gives a rank-1 moment matrix
    // at both levels
    auto pair = CommutationGraph::empty(2);
    const auto strings = realize_graph(pair);
    const StateVector psi = joint_eigenstate(strings, {0, 1});
    auto idx1 = build_theta_index_set(pair, 1);
    auto idx2 = build_theta_index_set(pair, 2);
    auto numeric = [&](const IndexSet& idx) {
        SdpSolution s;
        Eigen::MatrixXcd M(idx.size(), idx.size());
        for (int r = 0; r < idx.size(); ++r)
            for (int c = 0; c < idx.size(); ++c)
                M(r, c) = moment_entry_value(idx.monomials[r], idx.monomials[c], strings, psi);
        CHECK(M.imag().cwiseAbs().maxCoeff() < 1e-10);
        s.matrix = M.real();
        return s;
    };
    auto rep = rank_analysis(numeric(idx1), numeric(idx2));
    CHECK(rep.inner_rank == 1);
    CHECK(rep.outer_rank == 1);
    CHECK(rep.loop_detected);

    // C5 theta1 vs theta2: report produced, values recorded
    auto c5rep = rank_analysis(s1, s2);
    CHECK(c5rep.outer_singular_values.size() == 16);
    CHECK(c5rep.inner_singular_values.size() == 6);
    CHECK(c5rep.inner_rank >= 1);

    SdpSolution big, small;
    big.matrix = Eigen::MatrixXd::Identity(4, 4);
    small.matrix = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(rank_analysis(big, small), std::invalid_argument);
}

TEST_CASE("block cap is enforced") {
    auto p = theta_problem(cycle_graph(5), 1);
    SolveOptions opts;
    opts.block_cap = 3;
    auto s = solve(p, opts);
    CHECK(s.status == SolveStatus::solver_failure);
    CHECK(s.message.find("cap") != std::string::npos);
}
