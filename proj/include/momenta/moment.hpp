#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "momenta/algebra.hpp"
#include "momenta/graph.hpp"

namespace momenta {

class SizeCapError : public std::runtime_error {
public:
    SizeCapError(const std::string& what, long long count)
        : std::runtime_error(what + " (would have " + std::to_string(count) + " elements)"),
          would_be_count(count) {}
    long long would_be_count;
};

/// Row/column labels of a moment matrix.
struct IndexSet {
    enum class Kind { theta, full, custom };
    Kind kind = Kind::custom;
    int level = 0;
    std::vector<StateMonomial> monomials;  // first entry is the identity

    int size() const { return static_cast<int>(monomials.size()); }
};

namespace detail {

inline std::string monomial_key(const StateMonomial& m) {
    StateMonomial z = m;
    z.phase = Phase::one(z.phase.order());
    return render_monomial(z);
}

inline bool monomial_less(const StateMonomial& a, const StateMonomial& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    if (!a.word.same_letters(b.word)) return Word::letters_less(a.word, b.word);
    if (a.expectations.size() != b.expectations.size())
        return a.expectations.size() < b.expectations.size();
    for (size_t t = 0; t < a.expectations.size(); ++t) {
        if (!a.expectations[t].same_letters(b.expectations[t]))
            return Word::letters_less(a.expectations[t], b.expectations[t]);
    }
    return false;
}

}  // namespace detail

/// Lovasz-type index set: for every subset S of the operators with
/// |S| <= k (indices increasing), the monomial prod_{i in S} <a_i*> a_i.
inline IndexSet build_theta_index_set(const CommutationGraph& g, int k) {
    const int n = g.size();
    if (k < 1 || k > n) throw std::invalid_argument("theta level must satisfy 1 <= k <= n");
    IndexSet idx;
    idx.kind = IndexSet::Kind::theta;
    idx.level = k;
    std::vector<int> subset;
    auto emit = [&] {
        std::vector<Letter> word;
        std::vector<std::vector<Letter>> exps;
        for (int i : subset) {
            word.push_back(Letter{i, false});
            exps.push_back({Letter{i, true}});
        }
        idx.monomials.push_back(make_monomial(word, exps, g));
    };
    auto rec = [&](auto&& self, int start) -> void {
        emit();
        if (static_cast<int>(subset.size()) == k) return;
        for (int i = start; i < n; ++i) {
            subset.push_back(i);
            self(self, i + 1);
            subset.pop_back();
        }
    };
    rec(rec, 0);
    std::stable_sort(idx.monomials.begin(), idx.monomials.end(), detail::monomial_less);
    return idx;
}

namespace detail {

/// Canonical words of degree <= maxdeg: ascending indices, one signed
/// exponent per index (hermitian graphs allow exponent 1 only).
inline void enumerate_words(const CommutationGraph& g, int maxdeg, std::vector<Word>& out) {
    std::vector<Letter> cur;
    auto rec = [&](auto&& self, int start, int remaining) -> void {
        out.push_back(Word{cur, Phase::one(g.phase_order())});
        for (int i = start; i < g.size(); ++i) {
            const int zmax = g.hermitian() ? 1 : remaining;
            for (int sign = 0; sign < (g.hermitian() ? 1 : 2); ++sign) {
                for (int z = 1; z <= zmax && z <= remaining; ++z) {
                    for (int c = 0; c < z; ++c) cur.push_back(Letter{i, sign == 1});
                    self(self, i + 1, remaining - z);
                    for (int c = 0; c < z; ++c) cur.pop_back();
                }
            }
        }
    };
    rec(rec, 0, maxdeg);
}

}  // namespace detail

/// All canonical state monomials of total degree <= level.
/// Throws SizeCapError with the would-be count when the cap is exceeded.
inline IndexSet build_full_index_set(const CommutationGraph& g, int level, long long cap = 5000) {
    if (level < 1) throw std::invalid_argument("full index level must be >= 1");
    std::vector<Word> words;
    detail::enumerate_words(g, level, words);
    std::sort(words.begin(), words.end(), Word::letters_less);

    // Count first, then materialize: word part w0 plus a multiset of
    // non-identity expectation words within the remaining degree.
    std::vector<const Word*> nonidentity;
    for (const Word& w : words)
        if (!w.is_identity()) nonidentity.push_back(&w);

    long long count = 0;
    auto count_rec = [&](auto&& self, size_t start, int remaining) -> void {
        ++count;
        for (size_t t = start; t < nonidentity.size(); ++t) {
            const int deg = nonidentity[t]->degree();
            if (deg <= remaining) self(self, t, remaining - deg);
        }
    };
    for (const Word& w0 : words)
        if (w0.degree() <= level) count_rec(count_rec, 0, level - w0.degree());
    if (count > cap) throw SizeCapError("full index set exceeds cap", count);

    IndexSet idx;
    idx.kind = IndexSet::Kind::full;
    idx.level = level;
    std::vector<std::vector<Letter>> exps;
    auto emit = [&](const Word& w0) {
        std::vector<Letter> word = w0.letters;
        idx.monomials.push_back(make_monomial(word, exps, g));
    };
    auto rec = [&](auto&& self, const Word& w0, size_t start, int remaining) -> void {
        emit(w0);
        for (size_t t = start; t < nonidentity.size(); ++t) {
            const int deg = nonidentity[t]->degree();
            if (deg > remaining) continue;
            exps.push_back(nonidentity[t]->letters);
            self(self, w0, t, remaining - deg);
            exps.pop_back();
        }
    };
    for (const Word& w0 : words)
        if (w0.degree() <= level) rec(rec, w0, 0, level - w0.degree());
    std::stable_sort(idx.monomials.begin(), idx.monomials.end(), detail::monomial_less);
    return idx;
}

/// Wrap a caller-supplied monomial list; rejects duplicate canonical forms
/// and reorders so the identity leads.
inline IndexSet make_custom_index_set(std::vector<StateMonomial> monomials) {
    IndexSet idx;
    idx.kind = IndexSet::Kind::custom;
    std::stable_sort(monomials.begin(), monomials.end(), detail::monomial_less);
    for (size_t t = 0; t + 1 < monomials.size(); ++t)
        if (monomials[t].same_support(monomials[t + 1]))
            throw std::invalid_argument("custom index set has duplicate canonical forms");
    if (monomials.empty() || !monomials.front().is_one())
        throw std::invalid_argument("custom index set must contain the identity monomial");
    idx.monomials = std::move(monomials);
    return idx;
}

/// One equality class of moment-matrix entries: all positions whose scalar
/// <u* v> equals phase * rep.
struct MomentClass {
    StateMonomial rep;  // scalar, phase +1
    struct Position {
        int row, col;
        Phase phase;
    };
    std::vector<Position> positions;
    int conj_class = -1;  // class of rep*, with involution(rep) = conj_phase * that rep
    Phase conj_phase;
    bool is_unit = false;
};

/// Symbolic moment matrix: entry equality classes, per-position phases,
/// conjugation pairing, and the objective classes sum_i |<a_i>|^2.
struct MomentLayout {
    CommutationGraph graph;
    IndexSet index;
    int m = 0;
    std::vector<MomentClass> classes;
    std::vector<int> pos_class;    // m*m, row-major
    std::vector<int> pos_phase;    // phase exponents mod 2d
    std::vector<int> objective_class;  // one per operator
    int unit_class = -1;

    int class_at(int r, int c) const { return pos_class[static_cast<size_t>(r) * m + c]; }
    Phase phase_at(int r, int c) const {
        return Phase(graph.phase_order(), pos_phase[static_cast<size_t>(r) * m + c]);
    }
    /// Scalar monomial of one entry, phase included.
    StateMonomial entry(int r, int c) const {
        StateMonomial s = classes[class_at(r, c)].rep;
        s.phase = phase_at(r, c);
        return s;
    }
};

/// Group the m^2 entries <u* v> by canonical scalar; phases are recorded
/// relative to the phase-free representative.  Second-order exchange equalities
/// emerge from canonicalization rather than being imposed as constraints.
inline MomentLayout build_layout(const IndexSet& idx, const CommutationGraph& g) {
    MomentLayout lay;
    lay.graph = g;
    lay.index = idx;
    lay.m = idx.size();
    if (lay.m == 0 || !idx.monomials.front().is_one())
        throw std::invalid_argument("index set must lead with the identity monomial");
    lay.pos_class.assign(static_cast<size_t>(lay.m) * lay.m, -1);
    lay.pos_phase.assign(static_cast<size_t>(lay.m) * lay.m, 0);

    std::vector<StateMonomial> involutions;
    involutions.reserve(lay.m);
    for (const StateMonomial& u : idx.monomials) involutions.push_back(involution(u, g));

    std::map<std::string, int> class_of;
    auto intern = [&](const StateMonomial& scalar) -> std::pair<int, Phase> {
        std::string key = detail::monomial_key(scalar);
        auto it = class_of.find(key);
        if (it == class_of.end()) {
            MomentClass cls;
            cls.rep = scalar;
            cls.rep.phase = Phase::one(g.phase_order());
            cls.is_unit = cls.rep.is_one();
            it = class_of.emplace(std::move(key), static_cast<int>(lay.classes.size())).first;
            lay.classes.push_back(std::move(cls));
        }
        return {it->second, scalar.phase};
    };

    for (int r = 0; r < lay.m; ++r)
        for (int c = 0; c < lay.m; ++c) {
            const StateMonomial scalar =
                expectation_reduce(multiply(involutions[r], idx.monomials[c], g));
            auto [cid, ph] = intern(scalar);
            lay.classes[cid].positions.push_back({r, c, ph});
            lay.pos_class[static_cast<size_t>(r) * lay.m + c] = cid;
            lay.pos_phase[static_cast<size_t>(r) * lay.m + c] = ph.exponent();
            if (lay.classes[cid].is_unit && lay.unit_class < 0) lay.unit_class = cid;
        }

    // Conjugation pairing; the partner class always occurs because the
    // transposed position carries the conjugated scalar.
    for (size_t cid = 0; cid < lay.classes.size(); ++cid) {
        const StateMonomial inv = involution(lay.classes[cid].rep, g);
        auto it = class_of.find(detail::monomial_key(inv));
        if (it == class_of.end()) throw std::logic_error("conjugate class missing from layout");
        lay.classes[cid].conj_class = it->second;
        lay.classes[cid].conj_phase = inv.phase;
    }

    // Objective: the class of <a_i*><a_i> per operator.
    for (int i = 0; i < g.size(); ++i) {
        const StateMonomial obj =
            make_monomial({}, {{Letter{i, true}}, {Letter{i, false}}}, g);
        auto it = class_of.find(detail::monomial_key(obj));
        if (it == class_of.end())
            throw std::invalid_argument("index set cannot express the objective |<a_i>|^2");
        lay.objective_class.push_back(it->second);
    }
    if (lay.unit_class < 0) throw std::logic_error("layout has no normalization entry");
    return lay;
}

/// Exchange factor xi_ab = prod_{a<c<=b} zeta(s_a,s_c) zeta(s_c,s_b) for
/// transposing positions a and b of a joint index sequence (entries are
/// graph vertices, -1 for the identity slot).
/// Computed from the exponent table alone, independent of the word algebra.
inline Phase exchange_phase(const std::vector<int>& joint, int a, int b, const CommutationGraph& g) {
    if (g.phase_order() != 2) throw std::invalid_argument("exchange_phase is defined for d=2");
    const int len = static_cast<int>(joint.size());
    if (a < 0 || b < 0 || a >= len || b >= len || a >= b)
        throw std::invalid_argument("exchange_phase: positions out of range");
    auto zeta = [&](int u, int v) {
        if (u < 0 || v < 0 || u == v) return Phase::one(2);
        return g.zeta(u, v);
    };
    Phase xi = Phase::one(2);
    for (int c = a + 1; c <= b; ++c) xi *= zeta(joint[a], joint[c]) * zeta(joint[c], joint[b]);
    return xi;
}

/// Joint sequence (i_k,...,i_1, j_1,...,j_k) for two theta-type
/// index monomials given by their operator subsets.
inline std::vector<int> joint_sequence(const std::vector<int>& i_vec, const std::vector<int>& j_vec) {
    std::vector<int> joint(i_vec.rbegin(), i_vec.rend());
    joint.insert(joint.end(), j_vec.begin(), j_vec.end());
    return joint;
}

// ---- real form -------------------------------------------------------------

struct RealTerm {
    int var;
    double coef;
};

struct RealEntry {
    double constant = 0;
    std::vector<RealTerm> terms;
};

/// Real semidefinite form of a layout: either the hermitian reduction of the
/// same size m, or the complex-to-real doubling [[Re,-Im],[Im,Re]] of size 2m.
/// Each variable is one real degree of freedom of one equality class.
struct RealLayout {
    int size = 0;
    bool embedded = false;  // true: 2m doubling
    int nvars = 0;
    struct VarInfo {
        int cls;
        int comp;  // 0 = real part / line coordinate, 1 = imaginary part
    };
    std::vector<VarInfo> vars;
    std::vector<int> class_var_re;  // per class; -1 when absent or pinned
    std::vector<int> class_var_im;
    std::vector<int> pinned_zero;   // classes pinned to zero
    std::vector<RealEntry> entries;  // size*size, row-major, symmetric
    std::vector<RealTerm> objective;

    const RealEntry& at(int r, int c) const { return entries[static_cast<size_t>(r) * size + c]; }
};

namespace detail {

/// Complex linear form a0 + sum coef_v * x_v over the real variables.
struct ComplexForm {
    std::complex<double> constant{0, 0};
    std::vector<std::pair<int, std::complex<double>>> terms;
};

}  // namespace detail

inline RealLayout real_embedding(const MomentLayout& lay, bool force_complex);

/// Hermitian d=2 layouts stay real at size m; everything else is embedded at
/// size 2m.  This is what the SDP assembly consumes.
inline RealLayout realize_layout(const MomentLayout& lay) {
    return real_embedding(lay, /*force_complex=*/false);
}

inline RealLayout real_embedding(const MomentLayout& lay, bool force_complex) {
    const CommutationGraph& g = lay.graph;
    const bool real_case = g.hermitian() && g.phase_order() == 2;
    RealLayout out;
    out.embedded = force_complex || !real_case;
    out.size = out.embedded ? 2 * lay.m : lay.m;
    out.class_var_re.assign(lay.classes.size(), -1);
    out.class_var_im.assign(lay.classes.size(), -1);

    // Per-class value as a complex linear form in the real variables.
    std::vector<detail::ComplexForm> value(lay.classes.size());
    for (size_t cid = 0; cid < lay.classes.size(); ++cid) {
        const MomentClass& cls = lay.classes[cid];
        if (cls.is_unit) {
            value[cid].constant = 1.0;
            continue;
        }
        const int cc = cls.conj_class;
        if (cc == static_cast<int>(cid)) {
            // conj(v) = gamma v pins v to the line exp(-i*phi/2)*R.
            const std::complex<double> dir = std::conj(cls.conj_phase.half_angle_value());
            if (real_case && cls.conj_phase.is_minus_one()) {
                out.pinned_zero.push_back(static_cast<int>(cid));  // imaginary value, real matrix
                continue;
            }
            const int v = out.nvars++;
            out.vars.push_back({static_cast<int>(cid), 0});
            value[cid].terms.emplace_back(v, real_case ? std::complex<double>(1, 0) : dir);
            out.class_var_re[cid] = v;
        } else if (cc > static_cast<int>(cid)) {
            const int vx = out.nvars++;
            out.vars.push_back({static_cast<int>(cid), 0});
            value[cid].terms.emplace_back(vx, std::complex<double>(1, 0));
            out.class_var_re[cid] = vx;
            if (out.embedded) {
                const int vy = out.nvars++;
                out.vars.push_back({static_cast<int>(cid), 1});
                value[cid].terms.emplace_back(vy, std::complex<double>(0, 1));
                out.class_var_im[cid] = vy;
            }
        }
    }
    // Followers: val(rep_cc) = conj(gamma) * conj(val(rep_c)).
    for (size_t cid = 0; cid < lay.classes.size(); ++cid) {
        const int cc = lay.classes[cid].conj_class;
        if (cc >= 0 && cc < static_cast<int>(cid)) {
            const std::complex<double> gbar = std::conj(lay.classes[cc].conj_phase.value());
            for (const auto& [v, coef] : value[cc].terms)
                value[cid].terms.emplace_back(v, gbar * std::conj(coef));
            value[cid].constant = gbar * std::conj(value[cc].constant);
        }
    }
    out.entries.assign(static_cast<size_t>(out.size) * out.size, RealEntry{});
    auto add_entry = [&](int r, int c, double constant, const std::vector<RealTerm>& terms) {
        RealEntry& e = out.entries[static_cast<size_t>(r) * out.size + c];
        e.constant = constant;
        e.terms = terms;
    };

    for (int r = 0; r < lay.m; ++r)
        for (int c = 0; c < lay.m; ++c) {
            const int cid = lay.class_at(r, c);
            const std::complex<double> rho = lay.phase_at(r, c).value();
            const detail::ComplexForm& form = value[cid];
            std::vector<RealTerm> re_terms, im_terms;
            for (const auto& [v, coef] : form.terms) {
                const std::complex<double> z = rho * coef;
                if (std::abs(z.real()) > 1e-15) re_terms.push_back({v, z.real()});
                if (std::abs(z.imag()) > 1e-15) im_terms.push_back({v, z.imag()});
            }
            const std::complex<double> zc = rho * form.constant;
            if (!out.embedded) {
                add_entry(r, c, zc.real(), re_terms);
            } else {
                add_entry(r, c, zc.real(), re_terms);
                add_entry(r + lay.m, c + lay.m, zc.real(), re_terms);
                std::vector<RealTerm> neg;
                for (const auto& t : im_terms) neg.push_back({t.var, -t.coef});
                add_entry(r, c + lay.m, -zc.imag(), neg);
                add_entry(r + lay.m, c, zc.imag(), im_terms);
            }
        }

    for (int i = 0; i < g.size(); ++i) {
        const int cid = lay.objective_class[i];
        const int v = out.class_var_re[cid];
        if (v < 0) throw std::logic_error("objective class has no variable");
        out.objective.push_back({v, 1.0});
    }
    return out;
}

/// Deterministic text dump for golden-file tests.
inline std::string layout_dump(const MomentLayout& lay) {
    std::ostringstream out;
    out << "m=" << lay.m << " d=" << lay.graph.phase_order()
        << " hermitian=" << (lay.graph.hermitian() ? 1 : 0) << "\n";
    for (int r = 0; r < lay.m; ++r) out << "index " << r << ": " << render_monomial(lay.index.monomials[r]) << "\n";
    for (size_t cid = 0; cid < lay.classes.size(); ++cid) {
        const MomentClass& cls = lay.classes[cid];
        out << "class " << cid << ": rep=" << render_monomial(cls.rep) << " conj=" << cls.conj_class
            << " gamma=" << cls.conj_phase.str() << (cls.is_unit ? " unit" : "") << " positions=";
        for (const auto& p : cls.positions)
            out << "(" << p.row << "," << p.col << "," << p.phase.str() << ")";
        out << "\n";
    }
    return out.str();
}

}  // namespace momenta
