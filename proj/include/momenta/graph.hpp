#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "momenta/phase.hpp"

namespace momenta {

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Pairwise commutation data for n operators: A_i A_j = zeta_ij A_j A_i with
/// zeta_ij = exp(2*pi*i*e_ij/d).  For d=2 this is the anti-commutation graph
/// (e_ij = 1 means the pair anti-commutes) and the letters are hermitian.
class CommutationGraph {
public:
    CommutationGraph() : n_(0), d_(2), hermitian_(true) {}

    /// Build from the upper triangle; the lower triangle is filled with the
    /// conjugate exponents (d - e_ij) mod d.
    static CommutationGraph from_upper(int n, int d, const std::vector<std::array<int, 3>>& entries,
                                       bool hermitian_letters = false) {
        if (n < 0) throw std::invalid_argument("negative vertex count");
        if (d < 1) throw std::invalid_argument("phase order must be positive");
        CommutationGraph g;
        g.n_ = n;
        g.d_ = d;
        g.hermitian_ = (d == 2) ? true : hermitian_letters;
        g.e_.assign(static_cast<size_t>(n) * n, 0);
        for (const auto& t : entries) g.set_exponent(t[0], t[1], t[2]);
        return g;
    }

    static CommutationGraph empty(int n, int d = 2) { return from_upper(n, d, {}); }

    int size() const { return n_; }
    int phase_order() const { return d_; }
    bool hermitian() const { return hermitian_; }

    int exponent(int i, int j) const { return e_[static_cast<size_t>(i) * n_ + j]; }
    bool edge(int i, int j) const { return i != j && exponent(i, j) != 0; }

    /// zeta_ij as an exact phase mod 2d.
    Phase zeta(int i, int j) const { return Phase::root_of_unity(d_, exponent(i, j)); }

    void set_exponent(int i, int j, int e) {
        if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j)
            throw std::invalid_argument("exponent index out of range");
        if (e <= 0 || e >= d_) throw std::invalid_argument("exponent out of range");
        e_[static_cast<size_t>(i) * n_ + j] = e;
        e_[static_cast<size_t>(j) * n_ + i] = (d_ - e) % d_;
    }

    int edge_count() const {
        int c = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (edge(i, j)) ++c;
        return c;
    }

    /// Adjacency rows as bitmasks; valid for n <= 64.
    std::vector<std::uint64_t> adjacency_masks() const {
        std::vector<std::uint64_t> adj(n_, 0);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (edge(i, j)) adj[i] |= (1ULL << j);
        return adj;
    }

    bool operator==(const CommutationGraph& o) const {
        return n_ == o.n_ && d_ == o.d_ && hermitian_ == o.hermitian_ && e_ == o.e_;
    }

private:
    int n_, d_;
    bool hermitian_;
    std::vector<int> e_;
};

/// Chordless odd cycle in a d=2 graph; the support of a hole inequality.
struct OddHole {
    std::vector<int> vertices;

    int length() const { return static_cast<int>(vertices.size()); }
    int rhs() const { return length() / 2; }

    bool valid(const CommutationGraph& g) const {
        const int len = length();
        if (g.phase_order() != 2 || len < 5 || len % 2 == 0) return false;
        for (int a = 0; a < len; ++a)
            for (int b = a + 1; b < len; ++b) {
                bool consecutive = (b == a + 1) || (a == 0 && b == len - 1);
                if (g.edge(vertices[a], vertices[b]) != consecutive) return false;
            }
        return true;
    }
};

struct IndependenceCertificate {
    int size = 0;
    std::vector<int> witness;
};

namespace detail {

inline constexpr int kG6Min = 63;
inline constexpr int kG6Max = 126;

}  // namespace detail

/// Parse one graph6 line (n <= 62, single-byte header).  Errors name the
/// offending byte offset.
inline CommutationGraph parse_graph6(const std::string& line) {
    std::string s = line;
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    if (s.empty()) throw ParseError("graph6: empty string");

    const unsigned char head = static_cast<unsigned char>(s[0]);
    if (head < detail::kG6Min || head > detail::kG6Max)
        throw ParseError("graph6: byte at offset 0 outside 63..126");
    if (head == 126) throw ParseError("graph6: multi-byte headers (n > 62) are not supported");
    const int n = head - detail::kG6Min;

    const size_t nbits = static_cast<size_t>(n) * (n - 1) / 2;
    const size_t nbytes = (nbits + 5) / 6;
    if (s.size() < 1 + nbytes)
        throw ParseError("graph6: malformed length, expected " + std::to_string(1 + nbytes) +
                         " bytes, got " + std::to_string(s.size()));
    if (s.size() > 1 + nbytes)
        throw ParseError("graph6: trailing garbage at byte offset " + std::to_string(1 + nbytes));

    std::vector<std::array<int, 3>> edges;
    size_t bit = 0;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i, ++bit) {
            const size_t byte_idx = 1 + bit / 6;
            const unsigned char c = static_cast<unsigned char>(s[byte_idx]);
            if (c < detail::kG6Min || c > detail::kG6Max)
                throw ParseError("graph6: byte at offset " + std::to_string(byte_idx) + " outside 63..126");
            const int chunk = c - detail::kG6Min;
            if ((chunk >> (5 - bit % 6)) & 1) edges.push_back({i, j, 1});
        }
    }
    return CommutationGraph::from_upper(n, 2, edges);
}

/// Inverse of parse_graph6 (d=2 graphs only).
inline std::string encode_graph6(const CommutationGraph& g) {
    if (g.phase_order() != 2) throw std::invalid_argument("graph6 encodes d=2 graphs only");
    const int n = g.size();
    if (n > 62) throw std::invalid_argument("graph6 single-byte header limited to n <= 62");
    std::string out(1, static_cast<char>(n + detail::kG6Min));
    int chunk = 0, fill = 0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) {
            chunk = (chunk << 1) | (g.edge(i, j) ? 1 : 0);
            if (++fill == 6) {
                out.push_back(static_cast<char>(chunk + detail::kG6Min));
                chunk = fill = 0;
            }
        }
    if (fill > 0) out.push_back(static_cast<char>((chunk << (6 - fill)) + detail::kG6Min));
    return out;
}

/// Weighted edge-list format: header "n=<int> d=<int>", then lines "i j e"
/// with 0 <= i < j < n and 0 < e < d.  '#' starts a comment; omitted pairs
/// commute.  Errors carry the 1-based line number.
inline CommutationGraph parse_weighted_edgelist(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool have_header = false;
    int n = 0, d = 0;
    std::vector<std::array<int, 3>> entries;
    std::vector<bool> seen;

    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string ln = (hash == std::string::npos) ? raw : raw.substr(0, hash);
        std::istringstream ls(ln);
        if (!have_header) {
            std::string tn, td;
            if (!(ls >> tn)) continue;  // blank line before header
            if (!(ls >> td) || tn.rfind("n=", 0) != 0 || td.rfind("d=", 0) != 0)
                throw ParseError("line " + std::to_string(lineno) + ": expected header \"n=<int> d=<int>\"");
            std::string rest;
            if (ls >> rest) throw ParseError("line " + std::to_string(lineno) + ": trailing tokens after header");
            try {
                n = std::stoi(tn.substr(2));
                d = std::stoi(td.substr(2));
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(lineno) + ": bad header integers");
            }
            if (n < 0 || d < 1)
                throw ParseError("line " + std::to_string(lineno) + ": invalid n or d");
            seen.assign(static_cast<size_t>(n) * n, false);
            have_header = true;
            continue;
        }
        long long i, j, e;
        if (!(ls >> i)) continue;  // blank or comment-only line
        if (!(ls >> j >> e))
            throw ParseError("line " + std::to_string(lineno) + ": expected \"i j e\"");
        std::string rest;
        if (ls >> rest) throw ParseError("line " + std::to_string(lineno) + ": trailing tokens");
        if (i < 0 || j >= n || i >= j)
            throw ParseError("line " + std::to_string(lineno) + ": index out of range (need 0 <= i < j < n)");
        if (e <= 0 || e >= d)
            throw ParseError("line " + std::to_string(lineno) + ": exponent out of range (need 0 < e < d)");
        if (seen[static_cast<size_t>(i) * n + j])
            throw ParseError("line " + std::to_string(lineno) + ": duplicate pair (" + std::to_string(i) +
                             "," + std::to_string(j) + ")");
        seen[static_cast<size_t>(i) * n + j] = true;
        entries.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(e)});
    }
    if (!have_header) throw ParseError("missing header \"n=<int> d=<int>\"");
    return CommutationGraph::from_upper(n, d, entries);
}

inline std::string encode_weighted_edgelist(const CommutationGraph& g) {
    std::ostringstream out;
    out << "n=" << g.size() << " d=" << g.phase_order() << "\n";
    for (int i = 0; i < g.size(); ++i)
        for (int j = i + 1; j < g.size(); ++j)
            if (g.exponent(i, j) != 0) out << i << " " << j << " " << g.exponent(i, j) << "\n";
    return out.str();
}

/// Toggle edges (d=2 only).
inline CommutationGraph complement(const CommutationGraph& g) {
    if (g.phase_order() != 2) throw std::invalid_argument("complement defined for d=2 graphs only");
    std::vector<std::array<int, 3>> entries;
    for (int i = 0; i < g.size(); ++i)
        for (int j = i + 1; j < g.size(); ++j)
            if (!g.edge(i, j)) entries.push_back({i, j, 1});
    return CommutationGraph::from_upper(g.size(), 2, entries);
}

namespace detail {

/// Greedy clique-cover bound: an independent set takes at most one vertex
/// per clique of the cover.
inline int clique_cover_bound(const std::vector<std::uint64_t>& adj, std::uint64_t cand) {
    std::vector<std::uint64_t> cliques;
    for (std::uint64_t rest = cand; rest;) {
        const int v = std::countr_zero(rest);
        rest &= rest - 1;
        bool placed = false;
        for (auto& c : cliques) {
            if ((c & ~adj[v]) == 0) {  // v adjacent to every member
                c |= (1ULL << v);
                placed = true;
                break;
            }
        }
        if (!placed) cliques.push_back(1ULL << v);
    }
    return static_cast<int>(cliques.size());
}

inline void independence_expand(const std::vector<std::uint64_t>& adj, std::uint64_t cand,
                                std::uint64_t cur, int cur_size, IndependenceCertificate& best) {
    if (cur_size > best.size) {
        best.size = cur_size;
        best.witness.clear();
        for (std::uint64_t m = cur; m;) {
            best.witness.push_back(std::countr_zero(m));
            m &= m - 1;
        }
    }
    if (!cand) return;
    if (cur_size + clique_cover_bound(adj, cand) <= best.size) return;
    const int v = std::countr_zero(cand);  // lowest-index-first branching
    const std::uint64_t bit = 1ULL << v;
    independence_expand(adj, (cand & ~bit) & ~adj[v], cur | bit, cur_size + 1, best);
    independence_expand(adj, cand & ~bit, cur, cur_size, best);
}

}  // namespace detail

/// Exact maximum pairwise-commuting subset (e_ij = 0 pairs), with witness.
/// Branch and bound with a greedy clique-cover bound; n <= 64.
inline IndependenceCertificate independence_number(const CommutationGraph& g) {
    if (g.size() > 64) throw std::invalid_argument("independence_number limited to n <= 64");
    IndependenceCertificate best;
    if (g.size() == 0) return best;
    const auto adj = g.adjacency_masks();
    const std::uint64_t all = (g.size() == 64) ? ~0ULL : ((1ULL << g.size()) - 1);
    detail::independence_expand(adj, all, 0, 0, best);
    std::sort(best.witness.begin(), best.witness.end());
    return best;
}

/// All chordless odd cycles of length 5..max_len, each reported once with
/// the smallest vertex first and the smaller neighbour second.
inline std::vector<OddHole> enumerate_odd_holes(const CommutationGraph& g, int max_len) {
    if (g.phase_order() != 2) throw std::invalid_argument("odd holes defined for d=2 graphs only");
    if (max_len < 5 || max_len % 2 == 0) throw std::invalid_argument("max_len must be odd and >= 5");
    const int n = g.size();
    std::vector<OddHole> holes;
    std::vector<int> path;

    // Grow induced paths from a fixed root; a candidate may touch only the
    // path tip, or tip and root when it closes a cycle.
    auto extend = [&](auto&& self) -> void {
        const int tip = path.back();
        const int root = path[0];
        const int len = static_cast<int>(path.size());
        for (int v = root + 1; v < n; ++v) {
            if (!g.edge(tip, v)) continue;
            if (std::find(path.begin(), path.end(), v) != path.end()) continue;
            bool chord = false;
            for (int t = 1; t + 1 < len && !chord; ++t) chord = g.edge(path[t], v);
            if (chord) continue;
            if (len >= 2 && g.edge(root, v)) {
                if (len + 1 >= 5 && (len + 1) % 2 == 1 && path[1] < v)
                    holes.push_back(OddHole{[&] {
                        std::vector<int> c = path;
                        c.push_back(v);
                        return c;
                    }()});
                continue;  // a closing vertex cannot extend an induced path
            }
            if (len + 1 < max_len) {
                path.push_back(v);
                self(self);
                path.pop_back();
            }
        }
    };

    for (int root = 0; root < n; ++root) {
        path.assign(1, root);
        extend(extend);
    }
    return holes;
}

}  // namespace momenta
