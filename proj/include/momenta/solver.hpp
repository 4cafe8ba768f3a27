#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "momenta/sdp.hpp"

namespace momenta {

namespace detail {

struct SparseEntry {
    int blk, r, c;
    double v;
};

/// Symmetric square root and inverse square root via eigendecomposition.
/// Eigenvalues are floored relative to the largest one so that roundoff
/// negatives cannot blow up the inverse.
inline void sqrt_pair(const Eigen::MatrixXd& A, Eigen::MatrixXd& half, Eigen::MatrixXd& inv_half) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const double floor = std::max(es.eigenvalues().maxCoeff(), 1e-100) * 1e-15;
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(floor);
    const Eigen::MatrixXd& Q = es.eigenvectors();
    half = Q * lam.cwiseSqrt().asDiagonal() * Q.transpose();
    inv_half = Q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * Q.transpose();
}

/// Largest step t with M + t*D staying positive definite (fraction tau).
inline double max_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& D, double tau) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) return 0.0;
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd K = L.triangularView<Eigen::Lower>().solve(D);
    K = L.triangularView<Eigen::Lower>().solve(K.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()),
                                                      Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-14) return 1.0;
    return std::min(1.0, -tau / lmin);
}

}  // namespace detail

/// Infeasible primal-dual interior-point method with Nesterov-Todd scaling
/// and a Mehrotra-style adaptive centering parameter.  Solves
///   maximize obj.x  s.t.  F0_b + sum_j x_j Fj_b >= 0.
inline SdpSolution native_solve(const SdpProblem& p, const SolveOptions& opts = {}) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    SdpSolution sol;
    const int k = p.nvars;
    const int nb = static_cast<int>(p.blocks.size());
    if (nb == 0) {
        sol.status = SolveStatus::optimal;
        sol.primal_value = sol.dual_value = p.objective_constant;
        return sol;
    }
    for (const auto& b : p.blocks)
        if (b.size > opts.block_cap) {
            sol.message = "block size exceeds cap";
            return sol;
        }

    // Constant part and per-variable sparse coefficient lists.
    std::vector<MatrixXd> F0(nb);
    std::vector<std::vector<detail::SparseEntry>> varF(k);
    double norm_f0 = 1.0;
    int total_dim = 0;
    for (int b = 0; b < nb; ++b) {
        const auto& blk = p.blocks[b];
        total_dim += blk.size;
        F0[b].setZero(blk.size, blk.size);
        for (int r = 0; r < blk.size; ++r)
            for (int c = 0; c < blk.size; ++c) {
                const RealEntry& e = blk.at(r, c);
                F0[b](r, c) = e.constant;
                norm_f0 = std::max(norm_f0, std::abs(e.constant));
                for (const RealTerm& t : e.terms)
                    if (t.coef != 0) varF[t.var].push_back({b, r, c, t.coef});
            }
        F0[b] = 0.5 * (F0[b] + F0[b].transpose()).eval();
    }
    double norm_g = 1.0;
    for (double v : p.objective) norm_g = std::max(norm_g, std::abs(v));

    auto assemble_M = [&](const VectorXd& x) {
        std::vector<MatrixXd> M = F0;
        for (int j = 0; j < k; ++j)
            for (const auto& e : varF[j]) M[e.blk](e.r, e.c) += x(j) * e.v;
        return M;
    };

    if (k == 0) {
        const auto M = assemble_M(VectorXd::Zero(0));
        double mineig = 0;
        for (const auto& mb : M) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(mb, Eigen::EigenvaluesOnly);
            mineig = std::min(mineig, es.eigenvalues().minCoeff());
        }
        sol.status = mineig >= -opts.psd_tol ? SolveStatus::optimal : SolveStatus::infeasible;
        sol.primal_value = sol.dual_value = p.objective_constant;
        sol.matrix = M[0];
        sol.min_eigenvalue = mineig;
        return sol;
    }

    // Iterates.
    VectorXd x = VectorXd::Zero(k);
    std::vector<MatrixXd> X(nb), S(nb);
    for (int b = 0; b < nb; ++b) {
        X[b] = 10.0 * norm_g * MatrixXd::Identity(p.blocks[b].size, p.blocks[b].size);
        S[b] = 10.0 * norm_f0 * MatrixXd::Identity(p.blocks[b].size, p.blocks[b].size);
    }

    std::vector<MatrixXd> W(nb), Sinv(nb), Rd(nb);
    VectorXd rp(k);
    int stalls = 0;

    // Best iterate so far, by the worst of the three scaled residuals; late
    // iterations can degrade numerically and must not overwrite it.
    double best_merit = std::numeric_limits<double>::infinity();
    VectorXd x_best = x;
    double best_pobj = 0, best_dobj = 0, best_gap = 1;
    int best_iter = 0;

    const double tau = 0.98;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        sol.iterations = iter;

        // Residuals and objective values.
        auto M = assemble_M(x);
        double mu = 0, dinf = 0;
        for (int b = 0; b < nb; ++b) {
            Rd[b] = M[b] - S[b];
            dinf = std::max(dinf, Rd[b].cwiseAbs().maxCoeff());
            mu += X[b].cwiseProduct(S[b]).sum();
        }
        mu /= total_dim;
        double pobj = p.objective_constant, dobj = p.objective_constant, xs = 0;
        for (int j = 0; j < k; ++j) pobj += p.objective[j] * x(j);
        for (int b = 0; b < nb; ++b) dobj += F0[b].cwiseProduct(X[b]).sum();
        for (int b = 0; b < nb; ++b) xs += X[b].cwiseProduct(S[b]).sum();
        for (int j = 0; j < k; ++j) {
            double ax = 0;
            for (const auto& e : varF[j]) ax += e.v * X[e.blk](e.r, e.c);
            rp(j) = -p.objective[j] - ax;
        }
        const double pinf = k ? rp.cwiseAbs().maxCoeff() : 0.0;
        const double gap_rel = std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));

        if (!std::isfinite(mu) || !std::isfinite(pobj) || !std::isfinite(pinf) ||
            !std::isfinite(dinf)) {
            sol.message = "numerical breakdown";
            break;
        }

        const double pscale = 1.0 + norm_g, dscale = 1.0 + norm_f0;
        const double merit = std::max({gap_rel, pinf / pscale, dinf / dscale});
        if (merit < best_merit) {
            best_merit = merit;
            x_best = x;
            best_pobj = pobj;
            best_dobj = dobj;
            best_gap = gap_rel;
            best_iter = iter;
        }
        if (gap_rel <= opts.gap_tol && pinf / pscale <= opts.feas_tol && dinf / dscale <= opts.feas_tol) {
            sol.status = SolveStatus::optimal;
            x_best = x;
            best_pobj = pobj;
            best_dobj = dobj;
            best_gap = gap_rel;
            best_iter = iter;
            break;
        }
        if (std::abs(pobj) > 1e14 * norm_g || x.cwiseAbs().maxCoeff() > 1e14) {
            sol.status = SolveStatus::unbounded;
            sol.message = "iterates diverged";
            break;
        }

        // Nesterov-Todd scaling W = S^-1/2 (S^1/2 X S^1/2)^1/2 S^-1/2.
        for (int b = 0; b < nb; ++b) {
            MatrixXd sh, sih;
            detail::sqrt_pair(S[b], sh, sih);
            MatrixXd th, tih;
            detail::sqrt_pair(sh * X[b] * sh, th, tih);
            W[b] = sih * th * sih;
            Sinv[b] = sih * sih;
        }

        // Schur complement B_jj' = sum_b tr(Fj W Fj' W).
        MatrixXd B(k, k);
        B.setZero();
        for (int j = 0; j < k; ++j)
            for (int j2 = j; j2 < k; ++j2) {
                double acc = 0;
                for (const auto& e : varF[j])
                    for (const auto& e2 : varF[j2])
                        if (e.blk == e2.blk) acc += e.v * e2.v * W[e.blk](e.c, e2.r) * W[e.blk](e2.c, e.r);
                B(j, j2) = acc;
                B(j2, j) = acc;
            }
        Eigen::LLT<MatrixXd> lltB(B);
        for (double ridge = 1e-12; lltB.info() != Eigen::Success && ridge < 1e-2; ridge *= 100) {
            lltB.compute(B + ridge * B.diagonal().maxCoeff() * MatrixXd::Identity(k, k));
        }
        if (lltB.info() != Eigen::Success) {
            sol.message = "schur factorization failed";
            break;
        }

        std::vector<MatrixXd> WRdW(nb);
        for (int b = 0; b < nb; ++b) WRdW[b] = W[b] * Rd[b] * W[b];

        auto direction = [&](double sigma_mu, std::vector<MatrixXd>& dX, std::vector<MatrixXd>& dS,
                             VectorXd& dx) {
            VectorXd h(k);
            for (int j = 0; j < k; ++j) {
                double acc = -rp(j);
                for (const auto& e : varF[j]) {
                    const MatrixXd& Rc = Sinv[e.blk];
                    acc += e.v * (sigma_mu * Rc(e.r, e.c) - X[e.blk](e.r, e.c) - WRdW[e.blk](e.r, e.c));
                }
                h(j) = acc;
            }
            dx = lltB.solve(h);
            dS.assign(nb, MatrixXd());
            dX.assign(nb, MatrixXd());
            for (int b = 0; b < nb; ++b) dS[b] = Rd[b];
            for (int j = 0; j < k; ++j)
                for (const auto& e : varF[j]) dS[e.blk](e.r, e.c) += dx(j) * e.v;
            for (int b = 0; b < nb; ++b) {
                dS[b] = 0.5 * (dS[b] + dS[b].transpose()).eval();
                dX[b] = sigma_mu * Sinv[b] - X[b] - W[b] * dS[b] * W[b];
                dX[b] = 0.5 * (dX[b] + dX[b].transpose()).eval();
            }
        };

        std::vector<MatrixXd> dX, dS;
        VectorXd dx;
        direction(0.0, dX, dS, dx);  // affine predictor
        double ap = 1.0, ad = 1.0;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, detail::max_step(X[b], dX[b], tau));
            ad = std::min(ad, detail::max_step(S[b], dS[b], tau));
        }
        double mu_aff = 0;
        for (int b = 0; b < nb; ++b)
            mu_aff += (X[b] + ap * dX[b]).cwiseProduct(S[b] + ad * dS[b]).sum();
        mu_aff = std::max(mu_aff / total_dim, 0.0);
        const double sigma = std::min(1.0, std::pow(mu_aff / std::max(mu, 1e-300), 3));

        direction(sigma * mu, dX, dS, dx);  // centering corrector
        ap = ad = 1.0;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, detail::max_step(X[b], dX[b], tau));
            ad = std::min(ad, detail::max_step(S[b], dS[b], tau));
        }
        if (ap < 1e-10 && ad < 1e-10) {
            if (++stalls >= 5) {
                sol.message = "step size collapsed";
                break;
            }
        } else {
            stalls = 0;
        }
        for (int b = 0; b < nb; ++b) {
            X[b] += ap * dX[b];
            S[b] += ad * dS[b];
        }
        x += ad * dx;
    }

    // Report the best iterate seen.
    {
        auto M = assemble_M(x_best);
        double mineig = 0;
        for (const auto& mb : M) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(mb, Eigen::EigenvaluesOnly);
            mineig = std::min(mineig, es.eigenvalues().minCoeff());
        }
        sol.min_eigenvalue = mineig;
        sol.matrix = M[0];
        sol.primal_value = best_pobj;
        sol.dual_value = best_dobj;
        sol.gap = best_gap;
        sol.iterations = std::max(sol.iterations, best_iter);
        sol.x.assign(x_best.data(), x_best.data() + k);
    }
    if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::unbounded) {
        if (best_merit <= 100 * std::max(opts.gap_tol, opts.feas_tol)) {
            sol.status = SolveStatus::near_optimal;
        } else {
            sol.status = SolveStatus::solver_failure;
            if (sol.message.empty()) sol.message = "iteration limit reached";
        }
    }
    return sol;
}

using SolverBackend = std::function<SdpSolution(const SdpProblem&, const SolveOptions&)>;

inline std::map<std::string, SolverBackend>& solver_registry() {
    static std::map<std::string, SolverBackend> reg = {
        {"native", [](const SdpProblem& p, const SolveOptions& o) { return native_solve(p, o); }}};
    return reg;
}

/// Solve through the pluggable backend contract (opts.backend names it).
inline SdpSolution solve(const SdpProblem& p, const SolveOptions& opts = {}) {
    auto& reg = solver_registry();
    auto it = reg.find(opts.backend);
    if (it == reg.end()) throw std::invalid_argument("unknown solver backend: " + opts.backend);
    return it->second(p, opts);
}

}  // namespace momenta
