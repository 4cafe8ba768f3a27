#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "momenta/algebra.hpp"
#include "momenta/representation.hpp"
#include "test_util.hpp"

using namespace momenta;
using namespace testutil;

namespace {

std::vector<Letter> random_letters(std::mt19937_64& rng, int n, int maxlen, bool hermitian) {
    std::vector<Letter> ls(rng() % (maxlen + 1));
    for (auto& l : ls) {
        l.index = static_cast<int>(rng() % n);
        l.starred = hermitian ? false : (rng() & 1);
    }
    return ls;
}

/// Words in which every operator occurs at most once.  The Weyl realization
/// is faithful on these: X^d = 1 on a single site can only merge words whose
/// per-index exponents differ by a multiple of d.
std::vector<Letter> random_distinct_letters(std::mt19937_64& rng, int n, bool hermitian) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng() % (i + 1)]);
    std::vector<Letter> ls(rng() % (n + 1));
    for (size_t t = 0; t < ls.size(); ++t)
        ls[t] = Letter{idx[t], hermitian ? false : static_cast<bool>(rng() & 1)};
    return ls;
}

/// Compare two words through their Weyl-string realization, phase included.
bool words_match_numerically(const Word& a, const Word& b, const CommutationGraph& g) {
    const auto strings = realize_graph(g);
    WeylString pa(g.phase_order(), std::vector<std::pair<int, int>>(g.size(), {0, 0}));
    WeylString pb = pa;
    for (const Letter& l : a.letters)
        pa = multiply_strings(pa, l.starred ? adjoint_string(strings[l.index]) : strings[l.index]);
    for (const Letter& l : b.letters)
        pb = multiply_strings(pb, l.starred ? adjoint_string(strings[l.index]) : strings[l.index]);
    pa.global *= a.phase;
    pb.global *= b.phase;
    return strings_equal(pa, pb);
}

}  // namespace

TEST_CASE("canonicalize_word: stated examples") {
    auto g = parse_weighted_edgelist("n=3 d=2\n0 1 1\n");  // zeta_12 = -1 (1-based a1,a2)
    // [a2, a1] -> -a1 a2
    Word w = canonicalize_word({{1, false}, {0, false}}, g);
    CHECK(w.letters == std::vector<Letter>{{0, false}, {1, false}});
    CHECK(w.phase.is_minus_one());

    // hermitian unitary square-free: [a1, a1] -> e with phase +1
    Word sq = canonicalize_word({{0, false}, {0, false}}, g);
    CHECK(sq.is_identity());
    CHECK(sq.phase.is_one());
}

TEST_CASE("canonicalize_word for d=3 against explicit qutrit matrices") {
    auto g = parse_weighted_edgelist("n=3 d=3\n0 2 1\n");  // zeta_13 = w
    // raw [a3, a1, a3]
    std::vector<Letter> raw = {{2, false}, {0, false}, {2, false}};
    Word w = canonicalize_word(raw, g);
    CHECK(w.letters == std::vector<Letter>{{0, false}, {2, false}, {2, false}});
    CHECK(words_match_numerically(w, Word{raw, Phase::one(3)}, g));

    // same with matrices: multiply the realized strings densely
    const auto strings = realize_graph(g);
    Eigen::MatrixXcd lhs = weyl_matrix(strings[2]) * weyl_matrix(strings[0]) * weyl_matrix(strings[2]);
    Eigen::MatrixXcd rhs = w.phase.value() * weyl_matrix(strings[0]) * weyl_matrix(strings[2]) *
                           weyl_matrix(strings[2]);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("involution: stated examples") {
    auto g = parse_weighted_edgelist("n=2 d=2\n0 1 1\n");
    // (a1 a2)* = a2 a1 = -a1 a2 for an anti-commuting hermitian pair
    auto m = make_monomial({{0, false}, {1, false}}, {}, g);
    auto mi = involution(m, g);
    CHECK(mi.word.same_letters(m.word));
    CHECK(mi.phase.is_minus_one());
    // <a1>* = <a1> for hermitian letters
    auto e = make_monomial({}, {{{0, false}}}, g);
    CHECK(involution(e, g) == e);
    // phase conjugation for d=3: (w^{1/2} a1)* has the negated exponent
    auto q = parse_weighted_edgelist("n=2 d=3\n0 1 1\n");
    auto p = make_monomial({{0, false}}, {}, q, Phase(3, 1));
    auto pi = involution(p, q);
    CHECK(pi.phase == Phase(3, -1));
    CHECK(pi.word.letters == std::vector<Letter>{{0, true}});
}

TEST_CASE("multiply: stated examples") {
    auto g = parse_weighted_edgelist("n=2 d=2\n0 1 1\n");
    auto exp_a1 = make_monomial({}, {{{0, false}}}, g);  // <a1> e
    auto a1 = make_monomial({{0, false}}, {}, g);
    auto prod = multiply(exp_a1, a1, g);
    CHECK(prod == make_monomial({{0, false}}, {{{0, false}}}, g));  // <a1> a1

    CHECK(multiply(a1, a1, g).is_one());  // unitarity

    // (<a1 a2> a2) * (a1) = -<a1 a2> a1 a2
    auto x = make_monomial({{1, false}}, {{{0, false}, {1, false}}}, g);
    auto y = a1;
    auto p = multiply(x, y, g);
    auto expect = make_monomial({{0, false}, {1, false}}, {{{0, false}, {1, false}}}, g,
                                Phase::minus_one(2));
    CHECK(p == expect);

    // cross-check on the two-qubit Pauli realization of the pentagon:
    // <psi| op(x) op(y) |psi> computed from raw operator products must match
    // the value of the reduced symbolic product.
    const auto strings = pentagon_fixture();
    for (const auto& s : haar_sample(4, 3, 99)) {
        auto scalar = [&](const StateMonomial& m) {
            std::complex<double> v = m.phase.value();
            for (const Word& w : m.expectations) v *= word_value(w.letters, strings, s);
            return v;
        };
        const StateVector wy = apply_word(y.word.letters, strings, s);
        const StateVector wxy = apply_word(x.word.letters, strings, wy);
        const auto lhs = scalar(x) * scalar(y) * s.dot(wxy);
        const auto rhs = monomial_value(expectation_reduce(p), strings, s);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("expectation_reduce: stated examples") {
    auto g = parse_weighted_edgelist("n=2 d=2\n0 1 1\n");
    // <a1 <a2>> = <a1><a2>
    auto m = make_monomial({{0, false}}, {{{1, false}}}, g);
    auto r = expectation_reduce(m);
    CHECK(r.is_scalar());
    CHECK(r == make_monomial({}, {{{0, false}}, {{1, false}}}, g));
    CHECK(expectation_reduce(r) == r);  // idempotent

    CHECK(expectation_reduce(identity_monomial(g)).is_one());  // <e> = 1

    auto neg = make_monomial({{0, false}, {1, false}}, {}, g, Phase::minus_one(2));
    auto nr = expectation_reduce(neg);
    CHECK(nr.phase.is_minus_one());
    CHECK(nr.expectations.size() == 1);
}

TEST_CASE("confluence: different reduction orders agree") {
    std::mt19937_64 rng(5);
    for (int d : {2, 3, 4}) {
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 5);
            auto g = random_weighted_graph(n, d, rng);
            auto raw = random_letters(rng, n, 8, g.hermitian());
            const Word direct = canonicalize_word(raw, g);

            // apply a few random legal rewrites first, tracking phases
            std::vector<Letter> seq = raw;
            Phase acc = Phase::one(d);
            for (int step = 0; step < 6 && seq.size() > 1; ++step) {
                const size_t j = rng() % (seq.size() - 1);
                // swap seq[j], seq[j+1] and absorb the relation phase
                acc *= momenta::detail::swap_phase(seq[j], seq[j + 1], g);
                std::swap(seq[j], seq[j + 1]);
            }
            // invariant: original = acc * rewritten, so seed the phase with acc
            const Word reduced = canonicalize_word(seq, g, acc);
            CHECK(reduced.letters == direct.letters);
            CHECK(reduced.phase == direct.phase);
        }
    }
}

TEST_CASE("faithfulness: canonical equality iff matrix equality") {
    std::mt19937_64 rng(17);
    for (int d : {2, 3, 4}) {
        int equal_seen = 0;
        for (int trial = 0; trial < 150; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 4);
            auto g = random_weighted_graph(n, d, rng);
            auto raw_u = d == 2 ? random_letters(rng, n, 5, true)
                                : random_distinct_letters(rng, n, false);
            auto raw_v = d == 2 ? random_letters(rng, n, 5, true)
                                : random_distinct_letters(rng, n, false);
            const Word u = canonicalize_word(raw_u, g);
            const Word v = canonicalize_word(raw_v, g);
            const bool symbolic = (u == v);
            const bool numeric = words_match_numerically(Word{raw_u, Phase::one(d)},
                                                         Word{raw_v, Phase::one(d)}, g) ==
                                 true;
            // symbolic canonical forms equal iff the raw words act identically
            CHECK(symbolic == numeric);
            equal_seen += symbolic;
        }
        CHECK(equal_seen > 0);  // the generator does produce collisions
    }
}

TEST_CASE("involution is an involution and multiply is associative") {
    std::mt19937_64 rng(19);
    for (int d : {2, 3}) {
        for (int trial = 0; trial < 120; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 4);
            auto g = random_weighted_graph(n, d, rng);
            auto mono = [&] {
                std::vector<std::vector<Letter>> exps;
                for (size_t e = rng() % 3; e-- > 0;) {
                    auto w = random_letters(rng, n, 3, g.hermitian());
                    if (!w.empty()) exps.push_back(w);
                }
                return make_monomial(random_letters(rng, n, 4, g.hermitian()), exps, g,
                                     Phase(d, static_cast<long long>(rng() % (2 * d))));
            };
            auto x = mono(), y = mono(), z = mono();
            CHECK(involution(involution(x, g), g) == x);
            CHECK(multiply(multiply(x, y, g), z, g) == multiply(x, multiply(y, z, g), g));
        }
    }
}

TEST_CASE("phase exponents stay in range; hermitian phases are signs") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        auto g = random_graph(n, rng);
        auto w = canonicalize_word(random_letters(rng, n, 8, true), g);
        CHECK(w.phase.exponent() >= 0);
        CHECK(w.phase.exponent() < 4);
        CHECK((w.phase.is_one() || w.phase.is_minus_one()));
    }
}

TEST_CASE("rendering round-trips through the parser") {
    auto g = parse_weighted_edgelist("n=3 d=2\n0 1 1\n1 2 1\n");
    auto m = make_monomial({{0, false}, {1, false}}, {{{0, false}, {1, false}}}, g,
                           Phase::minus_one(2));
    CHECK(render_monomial(m) == "-<a1 a2> a1 a2");
    CHECK(parse_monomial(render_monomial(m), g) == m);
    CHECK(render_monomial(identity_monomial(g)) == "1");
    CHECK(parse_monomial("1", g).is_one());

    auto q = parse_weighted_edgelist("n=2 d=3\n0 1 2\n");
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<Letter>> exps;
        for (size_t e = rng() % 3; e-- > 0;) {
            auto w = random_letters(rng, 2, 3, false);
            if (!w.empty()) exps.push_back(w);
        }
        auto mono = make_monomial(random_letters(rng, 2, 3, false), exps, q,
                                  Phase(3, static_cast<long long>(rng() % 6)));
        CHECK(parse_monomial(render_monomial(mono), q) == mono);
    }
}
