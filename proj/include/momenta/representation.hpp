#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "momenta/graph.hpp"
#include "momenta/phase.hpp"

namespace momenta {

using StateVector = Eigen::VectorXcd;

class DimensionCapError : public std::runtime_error {
public:
    explicit DimensionCapError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr std::int64_t kDimensionCap = 4096;

/// Tensor product of single-site Heisenberg-Weyl operators sigma(k,l) = X^k Z^l
/// with an exact global phase.  sigma(k,l)|i> = w^{il}|i+k>, w = exp(2*pi*i/d).
struct WeylString {
    int d = 2;
    std::vector<std::pair<int, int>> sites;  // (k_t, l_t), exponents mod d
    Phase global;

    WeylString() : global(Phase::one(2)) {}
    WeylString(int d_, std::vector<std::pair<int, int>> s, Phase g = Phase())
        : d(d_), sites(std::move(s)), global(g.order() == d_ ? g : Phase::one(d_)) {}

    int num_sites() const { return static_cast<int>(sites.size()); }
    std::int64_t dim() const {
        std::int64_t D = 1;
        for (int t = 0; t < num_sites(); ++t) {
            D *= d;
            if (D > kDimensionCap) throw DimensionCapError("representation dimension exceeds cap");
        }
        return D;
    }
};

/// Exponent g with A B = w^g B A, from per-site arithmetic:
/// sigma(k,l) sigma(m,n) = w^{lm-kn} sigma(m,n) sigma(k,l).
inline int commutation_exponent(const WeylString& a, const WeylString& b) {
    if (a.d != b.d || a.sites.size() != b.sites.size())
        throw std::invalid_argument("commutation_exponent: mismatched strings");
    long long e = 0;
    for (size_t t = 0; t < a.sites.size(); ++t) {
        const auto [k, l] = a.sites[t];
        const auto [m, n] = b.sites[t];
        e += static_cast<long long>(l) * m - static_cast<long long>(k) * n;
    }
    return static_cast<int>(((e % a.d) + a.d) % a.d);
}

/// Phase-exact product: per site X^k Z^l X^m Z^n = w^{lm} X^{k+m} Z^{l+n}.
inline WeylString multiply_strings(const WeylString& a, const WeylString& b) {
    if (a.d != b.d || a.sites.size() != b.sites.size())
        throw std::invalid_argument("multiply_strings: mismatched strings");
    WeylString r(a.d, a.sites, a.global * b.global);
    long long cross = 0;
    for (size_t t = 0; t < a.sites.size(); ++t) {
        const auto [k, l] = a.sites[t];
        const auto [m, n] = b.sites[t];
        cross += static_cast<long long>(l) * m;
        r.sites[t] = {(k + m) % a.d, (l + n) % a.d};
    }
    r.global *= Phase::root_of_unity(a.d, cross);
    return r;
}

/// Adjoint via sigma(k,l)^dag = w^{kl} sigma(d-k, d-l) per site.
inline WeylString adjoint_string(const WeylString& a) {
    WeylString r(a.d, a.sites, a.global.conj());
    long long e = 0;
    for (size_t t = 0; t < a.sites.size(); ++t) {
        const auto [k, l] = a.sites[t];
        e += static_cast<long long>(k) * l;
        r.sites[t] = {(a.d - k) % a.d, (a.d - l) % a.d};
    }
    r.global *= Phase::root_of_unity(a.d, e);
    return r;
}

inline bool strings_equal(const WeylString& a, const WeylString& b) {
    return a.d == b.d && a.sites == b.sites && a.global == b.global;
}

/// Single-site sigma(k,l) as a dense matrix.
inline Eigen::MatrixXcd sigma_matrix(int k, int l, int d) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) m((i + k) % d, i) = Phase::root_of_unity(d, static_cast<long long>(i) * l).value();
    return m;
}

/// Displacement operator D(k,l) = w^{kl/2} sigma(k,l).
inline Eigen::MatrixXcd displacement_matrix(int k, int l, int d) {
    return Phase(d, static_cast<long long>(k) * l).value() * sigma_matrix(k, l, d);
}

inline WeylString displacement_string(int d, const std::vector<std::pair<int, int>>& sites) {
    long long half = 0;
    for (const auto& [k, l] : sites) half += static_cast<long long>(k) * l;
    return WeylString(d, sites, Phase(d, half));
}

/// Dense matrix of a full string; dimension capped at 4096.
inline Eigen::MatrixXcd weyl_matrix(const WeylString& s) {
    const std::int64_t D = s.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (const auto& [k, l] : s.sites) {
        const Eigen::MatrixXcd site = sigma_matrix(k, l, s.d);
        Eigen::MatrixXcd next(m.rows() * s.d, m.cols() * s.d);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                next.block(i * s.d, j * s.d, s.d, s.d) = m(i, j) * site;
        m = std::move(next);
    }
    (void)D;
    return s.global.value() * m;
}

/// Matrix-free action: strings permute basis states up to phases.
inline StateVector apply_string(const WeylString& s, const StateVector& v) {
    const std::int64_t D = s.dim();
    if (v.size() != D) throw std::invalid_argument("apply_string: dimension mismatch");
    const int N = s.num_sites();
    StateVector out = StateVector::Zero(D);
    std::vector<std::int64_t> stride(N);
    std::int64_t acc = 1;
    for (int t = N - 1; t >= 0; --t) {
        stride[t] = acc;
        acc *= s.d;
    }
    const std::complex<double> g = s.global.value();
    for (std::int64_t idx = 0; idx < D; ++idx) {
        std::int64_t out_idx = 0;
        long long wexp = 0;
        for (int t = 0; t < N; ++t) {
            const int digit = static_cast<int>((idx / stride[t]) % s.d);
            const auto [k, l] = s.sites[t];
            wexp += static_cast<long long>(digit) * l;
            out_idx += ((digit + k) % s.d) * stride[t];
        }
        out(out_idx) += g * Phase::root_of_unity(s.d, wexp).value() * v(idx);
    }
    return out;
}

inline std::complex<double> expectation(const WeylString& s, const StateVector& psi) {
    return psi.dot(apply_string(s, psi));  // Eigen dot conjugates the left argument
}

/// Objective sum_i |<psi|A_i|psi>|^2.
inline double objective_value(const std::vector<WeylString>& strings, const StateVector& psi) {
    double total = 0;
    for (const WeylString& s : strings) total += std::norm(expectation(s, psi));
    return total;
}

/// Greedy symplectic realization: string i acts as X on site i and Z^{e_ij}
/// on every earlier site j, which reproduces the graph phases exactly.
inline std::vector<WeylString> realize_graph(const CommutationGraph& g) {
    const int n = g.size();
    const int d = g.phase_order();
    std::vector<WeylString> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<int, int>> sites(n, {0, 0});
        sites[i] = {1, 0};
        for (int j = 0; j < i; ++j) sites[j] = {0, g.exponent(i, j)};
        out.emplace_back(d, std::move(sites));
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && commutation_exponent(out[i], out[j]) != g.exponent(i, j))
                throw std::logic_error("realize_graph: symbolic phase check failed");
    return out;
}

/// Commutation graph of an arbitrary string collection.
inline CommutationGraph graph_of_strings(const std::vector<WeylString>& strings) {
    const int n = static_cast<int>(strings.size());
    const int d = n ? strings[0].d : 2;
    std::vector<std::array<int, 3>> entries;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int e = commutation_exponent(strings[i], strings[j]);
            if (e != 0) entries.push_back({i, j, e});
        }
    return CommutationGraph::from_upper(n, d, entries);
}

// ---- sampling --------------------------------------------------------------

/// Haar states from normalized complex Gaussians.  The generator is
/// mt19937_64 with an explicit Box-Muller transform so that a seed fixes the
/// output bitstream across platforms.
inline std::vector<StateVector> haar_sample(std::int64_t dim, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return ((rng() >> 11) + 1.0) * 0x1.0p-53; };  // (0,1]
    std::vector<StateVector> out;
    out.reserve(count);
    for (int s = 0; s < count; ++s) {
        StateVector v(dim);
        for (std::int64_t i = 0; i < dim; ++i) {
            const double u1 = uniform(), u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            v(i) = {r * std::cos(2 * std::numbers::pi * u2), r * std::sin(2 * std::numbers::pi * u2)};
        }
        v.normalize();
        out.push_back(std::move(v));
    }
    return out;
}

/// Joint eigenstate of pairwise commuting hermitian unitary strings (d=2),
/// built by projecting onto the larger branch of (1 +- A)/2 in turn.
inline StateVector joint_eigenstate(const std::vector<WeylString>& strings,
                                    const std::vector<int>& subset) {
    if (strings.empty()) throw std::invalid_argument("joint_eigenstate: no strings");
    const std::int64_t D = strings[0].dim();
    StateVector psi = StateVector::Zero(D);
    for (std::int64_t i = 0; i < D; ++i) psi(i) = 1.0;  // deterministic full-support start
    psi.normalize();
    for (int id : subset) {
        const StateVector a = apply_string(strings[id], psi);
        const StateVector plus = 0.5 * (psi + a);
        const StateVector minus = 0.5 * (psi - a);
        psi = (plus.norm() >= minus.norm()) ? plus : minus;
        if (psi.norm() < 1e-14) throw std::logic_error("joint_eigenstate: projection vanished");
        psi.normalize();
    }
    return psi;
}

struct SeesawResult {
    StateVector state;
    double value = 0;
    int iterations = 0;
};

/// Fixed-point polish: replace psi by the top eigenvector of
/// H(psi) = sum_i <A_i>^* A_i + h.c.; the objective is non-decreasing.
inline SeesawResult seesaw_polish(const std::vector<WeylString>& strings, const StateVector& psi0,
                                  int max_iter = 200, double tol = 1e-10) {
    SeesawResult res;
    res.state = psi0.normalized();
    res.value = objective_value(strings, res.state);
    if (strings.empty()) return res;

    std::vector<WeylString> adjoints;
    adjoints.reserve(strings.size());
    for (const auto& s : strings) adjoints.push_back(adjoint_string(s));

    for (int it = 0; it < max_iter; ++it) {
        std::vector<std::complex<double>> c(strings.size());
        double shift = 1.0;
        for (size_t i = 0; i < strings.size(); ++i) {
            c[i] = expectation(strings[i], res.state);
            shift += 2.0 * std::abs(c[i]);
        }
        auto apply_H_shifted = [&](const StateVector& v) {
            StateVector out = shift * v;
            for (size_t i = 0; i < strings.size(); ++i) {
                out += std::conj(c[i]) * apply_string(strings[i], v);
                out += c[i] * apply_string(adjoints[i], v);
            }
            return out;
        };
        // Power iteration on the shifted (positive definite) operator.
        StateVector v = res.state;
        double rayleigh = 0;
        for (int p = 0; p < 500; ++p) {
            StateVector w = apply_H_shifted(v);
            const double nw = w.norm();
            if (nw < 1e-300) break;
            w /= nw;
            const double r = std::real(w.dot(apply_H_shifted(w)));
            if (p > 2 && std::abs(r - rayleigh) <= 1e-13 * std::max(1.0, std::abs(r))) {
                v = w;
                break;
            }
            rayleigh = r;
            v = std::move(w);
        }
        const double val = objective_value(strings, v);
        res.iterations = it + 1;
        const double gain = val - res.value;
        if (val > res.value) {
            res.state = v;
            res.value = val;
        }
        if (gain <= tol * std::max(1.0, std::abs(res.value))) break;
    }
    return res;
}

// ---- fixtures --------------------------------------------------------------

inline std::string render_weyl_string(const WeylString& s) {
    std::ostringstream out;
    out << "d=" << s.d << " ";
    for (const auto& [k, l] : s.sites) out << "(" << k << "," << l << ")";
    out << " phase=" << s.global.str();
    return out.str();
}

inline std::string render_state(const StateVector& v) {
    std::ostringstream out;
    char buf[80];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v(i).real(), v(i).imag());
        out << buf;
    }
    return out.str();
}

/// The five two-qubit Pauli observables whose anti-commutation graph is the
/// pentagon: XX, XY, 1X, YZ, YX (with sigma_y = i XZ).
inline std::vector<WeylString> pentagon_fixture() {
    const Phase i2 = Phase(2, 1);  // the scalar i for d=2 strings
    return {
        WeylString(2, {{1, 0}, {1, 0}}),                // XX
        WeylString(2, {{1, 0}, {1, 1}}, i2),            // XY
        WeylString(2, {{0, 0}, {1, 0}}),                // 1X
        WeylString(2, {{1, 1}, {0, 1}}, i2),            // YZ
        WeylString(2, {{1, 1}, {1, 0}}, i2),            // YX
    };
}

/// The CHSH strings XX, XY, YX, YY; their graph is the 4-cycle.
inline std::vector<WeylString> chsh_fixture() {
    const Phase i2 = Phase(2, 1);
    return {
        WeylString(2, {{1, 0}, {1, 0}}),                // XX
        WeylString(2, {{1, 0}, {1, 1}}, i2),            // XY
        WeylString(2, {{1, 1}, {1, 0}}, i2),            // YX
        WeylString(2, {{1, 1}, {1, 1}}, i2 * i2),       // YY
    };
}

}  // namespace momenta
