#pragma once

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "momenta/graph.hpp"
#include "momenta/phase.hpp"

namespace momenta {

/// One operator symbol a_i, optionally adjoint.  Hermitian graphs normalize
/// starred letters away at construction time.
struct Letter {
    int index = 0;
    bool starred = false;

    bool operator==(const Letter& o) const { return index == o.index && starred == o.starred; }
    bool operator<(const Letter& o) const {
        if (index != o.index) return index < o.index;
        return starred && !o.starred;  // starred sorts first within an index
    }
};

/// Word in the letters with an explicit scalar phase.  Canonical form groups
/// letters by ascending index; same-index runs are reduced through
/// a*a = aa* = e, so each run is homogeneous in the star flag (and for
/// hermitian unitary letters collapses to at most one letter).
struct Word {
    std::vector<Letter> letters;
    Phase phase;

    bool is_identity() const { return letters.empty(); }
    int degree() const { return static_cast<int>(letters.size()); }

    bool same_letters(const Word& o) const { return letters == o.letters; }
    bool operator==(const Word& o) const { return letters == o.letters && phase == o.phase; }

    /// Total order on canonical letter sequences: degree, then letterwise.
    static bool letters_less(const Word& a, const Word& b) {
        if (a.letters.size() != b.letters.size()) return a.letters.size() < b.letters.size();
        for (size_t t = 0; t < a.letters.size(); ++t) {
            if (!(a.letters[t] == b.letters[t])) return a.letters[t] < b.letters[t];
        }
        return false;
    }
};

namespace detail {

inline Letter normalize_letter(Letter l, const CommutationGraph& g) {
    if (g.hermitian()) l.starred = false;
    return l;
}

/// Phase picked up when the subword [x y] is rewritten as [y x]:
/// a_x a_y = zeta_xy a_y a_x, with the conjugate rule for mixed adjoints.
inline Phase swap_phase(const Letter& x, const Letter& y, const CommutationGraph& g) {
    if (x.index == y.index) return Phase::one(g.phase_order());
    Phase z = g.zeta(x.index, y.index);
    return (x.starred == y.starred) ? z : z.conj();
}

}  // namespace detail

/// Sort letters by index with exact phase bookkeeping, then cancel a*a pairs
/// (and apply a^2 = e for hermitian unitary letters).
inline Word canonicalize_word(const std::vector<Letter>& raw, const CommutationGraph& g,
                              Phase phase = Phase()) {
    const int d = g.phase_order();
    if (phase.order() != d) phase = Phase(d, 0);

    std::vector<Letter> ls;
    ls.reserve(raw.size());
    for (const Letter& l : raw) {
        if (l.index < 0 || l.index >= g.size()) throw std::invalid_argument("letter index out of range");
        ls.push_back(detail::normalize_letter(l, g));
    }

    // Bubble sort; each adjacent transposition contributes one zeta factor.
    for (size_t pass = 0; pass + 1 < ls.size() + 1; ++pass) {
        bool moved = false;
        for (size_t j = 0; j + 1 < ls.size(); ++j) {
            if (ls[j + 1] < ls[j]) {
                phase *= detail::swap_phase(ls[j], ls[j + 1], g);
                std::swap(ls[j], ls[j + 1]);
                moved = true;
            }
        }
        if (!moved) break;
    }

    // Reduce each same-index run: p unstarred and q starred letters leave
    // |p - q| of the majority kind; no phase is produced.
    std::vector<Letter> out;
    out.reserve(ls.size());
    size_t t = 0;
    while (t < ls.size()) {
        size_t end = t;
        int net = 0;
        while (end < ls.size() && ls[end].index == ls[t].index) {
            net += ls[end].starred ? -1 : 1;
            ++end;
        }
        if (g.hermitian()) net %= 2;  // hermitian unitary: a^2 = e
        for (int c = 0; c < std::abs(net); ++c)
            out.push_back(Letter{ls[t].index, net < 0});
        t = end;
    }
    return Word{std::move(out), phase};
}

/// Word adjoint: reverse, star every letter, re-canonicalize, conjugate phase.
inline Word word_involution(const Word& w, const CommutationGraph& g) {
    std::vector<Letter> rev(w.letters.rbegin(), w.letters.rend());
    for (Letter& l : rev)
        if (!g.hermitian()) l.starred = !l.starred;
    return canonicalize_word(rev, g, w.phase.conj());
}

/// Formal product w0 <w1> ... <wm> with an exact global phase.  Stored words
/// are canonical with phase folded into the monomial, expectation factors are
/// sorted, and <e> factors are dropped.
struct StateMonomial {
    Word word;                       // phase inside is always +1
    std::vector<Word> expectations;  // canonical, phase +1, sorted
    Phase phase;

    bool is_scalar() const { return word.is_identity(); }
    bool is_one() const { return word.is_identity() && expectations.empty(); }

    int degree() const {
        int deg = word.degree();
        for (const Word& w : expectations) deg += w.degree();
        return deg;
    }

    /// Equality of everything except the phase.
    bool same_support(const StateMonomial& o) const {
        if (!word.same_letters(o.word)) return false;
        if (expectations.size() != o.expectations.size()) return false;
        for (size_t t = 0; t < expectations.size(); ++t)
            if (!expectations[t].same_letters(o.expectations[t])) return false;
        return true;
    }
    bool operator==(const StateMonomial& o) const { return same_support(o) && phase == o.phase; }
};

namespace detail {

inline void absorb_expectation(StateMonomial& m, Word w) {
    m.phase *= w.phase;
    w.phase = Phase::one(w.phase.order());
    if (!w.is_identity()) m.expectations.push_back(std::move(w));  // <e> = 1
}

inline void sort_expectations(StateMonomial& m) {
    std::sort(m.expectations.begin(), m.expectations.end(), Word::letters_less);
}

}  // namespace detail

inline StateMonomial make_monomial(const std::vector<Letter>& raw_word,
                                   const std::vector<std::vector<Letter>>& raw_expectations,
                                   const CommutationGraph& g, Phase phase = Phase()) {
    const int d = g.phase_order();
    StateMonomial m;
    m.phase = (phase.order() == d) ? phase : Phase::one(d);
    Word w = canonicalize_word(raw_word, g);
    m.phase *= w.phase;
    w.phase = Phase::one(d);
    m.word = std::move(w);
    for (const auto& e : raw_expectations) detail::absorb_expectation(m, canonicalize_word(e, g));
    detail::sort_expectations(m);
    return m;
}

inline StateMonomial identity_monomial(const CommutationGraph& g) { return make_monomial({}, {}, g); }

inline StateMonomial multiply(const StateMonomial& x, const StateMonomial& y,
                              const CommutationGraph& g) {
    StateMonomial r;
    r.phase = x.phase * y.phase;
    std::vector<Letter> joined = x.word.letters;
    joined.insert(joined.end(), y.word.letters.begin(), y.word.letters.end());
    Word w = canonicalize_word(joined, g);
    r.phase *= w.phase;
    w.phase = Phase::one(g.phase_order());
    r.word = std::move(w);
    r.expectations = x.expectations;
    r.expectations.insert(r.expectations.end(), y.expectations.begin(), y.expectations.end());
    detail::sort_expectations(r);
    return r;
}

/// Adjoint of a state monomial: (v<w>)* = v* <w*>.
inline StateMonomial involution(const StateMonomial& m, const CommutationGraph& g) {
    StateMonomial r;
    r.phase = m.phase.conj();
    Word w = word_involution(m.word, g);
    r.phase *= w.phase;
    w.phase = Phase::one(g.phase_order());
    r.word = std::move(w);
    for (const Word& e : m.expectations) detail::absorb_expectation(r, word_involution(e, g));
    detail::sort_expectations(r);
    return r;
}

/// <m>: wrap the word part into one more expectation symbol, leaving a fully
/// scalar monomial.  Uses <v<w>> = <v><w> and <1> = 1; idempotent.
inline StateMonomial expectation_reduce(const StateMonomial& m) {
    StateMonomial r = m;
    if (!r.word.is_identity()) {
        r.expectations.push_back(r.word);
        r.word.letters.clear();
        detail::sort_expectations(r);
    }
    return r;
}

// ---- textual rendering ("-<a1 a2> a1 a2", letters shown 1-based) ----------

inline std::string render_word_letters(const Word& w) {
    std::string s;
    for (size_t t = 0; t < w.letters.size(); ++t) {
        if (t) s += ' ';
        s += 'a' + std::to_string(w.letters[t].index + 1);
        if (w.letters[t].starred) s += '*';
    }
    return s;
}

inline std::string render_monomial(const StateMonomial& m) {
    std::string s;
    if (m.phase.is_minus_one())
        s += "-";
    else if (!m.phase.is_one())
        s += m.phase.str() + " ";
    bool any = false;
    for (const Word& e : m.expectations) {
        if (any) s += ' ';
        s += '<' + render_word_letters(e) + '>';
        any = true;
    }
    if (!m.word.is_identity()) {
        if (any) s += ' ';
        s += render_word_letters(m.word);
        any = true;
    }
    if (!any) s += "1";
    return s;
}

namespace detail {

inline std::vector<Letter> parse_letters(const std::string& text, size_t& pos, char stop) {
    std::vector<Letter> ls;
    while (pos < text.size() && text[pos] != stop) {
        if (std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            continue;
        }
        if (text[pos] != 'a') throw ParseError("monomial: expected letter at position " + std::to_string(pos));
        ++pos;
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw ParseError("monomial: missing letter index");
        Letter l;
        l.index = std::stoi(text.substr(start, pos - start)) - 1;
        if (pos < text.size() && text[pos] == '*') {
            l.starred = true;
            ++pos;
        }
        ls.push_back(l);
    }
    return ls;
}

}  // namespace detail

/// Parse the render_monomial format; accepts "1", "-1", "-<a1 a2> a1", etc.
inline StateMonomial parse_monomial(const std::string& text, const CommutationGraph& g) {
    size_t pos = 0;
    Phase phase = Phase::one(g.phase_order());
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    skip_ws();
    if (pos < text.size() && text[pos] == '-') {
        phase = Phase::minus_one(g.phase_order());
        ++pos;
    } else if (pos + 1 < text.size() && text[pos] == 'w' && text[pos + 1] == '^') {
        pos += 2;
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        long long k = std::stoll(text.substr(start, pos - start));
        if (pos < text.size() && text[pos] == '/') {  // "/2d" suffix is informative only
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        phase = Phase(g.phase_order(), k);
    }
    std::vector<std::vector<Letter>> exps;
    std::vector<Letter> word;
    skip_ws();
    while (pos < text.size()) {
        if (text[pos] == '<') {
            ++pos;
            exps.push_back(detail::parse_letters(text, pos, '>'));
            if (pos >= text.size() || text[pos] != '>') throw ParseError("monomial: unterminated '<'");
            ++pos;
        } else if (text[pos] == '1') {
            ++pos;  // explicit identity
        } else if (std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        } else {
            auto ls = detail::parse_letters(text, pos, '<');
            word.insert(word.end(), ls.begin(), ls.end());
        }
    }
    return make_monomial(word, exps, g, phase);
}

}  // namespace momenta
