#pragma once

#include <array>
#include <bit>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "treeprob/errors.hpp"
#include "treeprob/linalg.hpp"
#include "treeprob/rng.hpp"
#include "treeprob/word_maps.hpp"

namespace treeprob {

// Suck's description of the Trybula region T_3: achievable triples of
// pairwise comparison probabilities (x, y, z) = (P(X1>X2), P(X2>X3), P(X3>X1)).
inline bool trybula_contains(const Rational& x, const Rational& y, const Rational& z) {
    for (const auto& v : {x, y, z})
        if (v < 0 || v > 1) throw std::invalid_argument("coordinates must lie in [0,1]");
    auto side = [](const Rational& a, const Rational& b, const Rational& c) {
        Rational one(1);
        return a + b * c <= one || b + a * c <= one || c + a * b <= one;
    };
    return side(x, y, z) && side(1 - x, 1 - y, 1 - z);
}

// Number of permutations of m symbols with exactly one nontrivial cycle:
// C(m) = sum_{k=2}^m m!/(k (m-k)!).
inline Integer pure_cycle_count(int m) {
    if (m < 1) throw std::invalid_argument("need m >= 1");
    Integer total(0);
    for (int k = 2; k <= m; ++k)
        total += binomial(static_cast<unsigned>(m), static_cast<unsigned>(k)) *
                 factorial(static_cast<unsigned>(k - 1));
    return total;
}

// Formal rational combinations of orderings of symbol subsets of {1..m}.
using Ordering = std::vector<int>;
using OrderingVector = std::map<Ordering, Rational>;

inline std::vector<Ordering> all_orderings(int m) {
    Ordering base(m);
    std::iota(base.begin(), base.end(), 1);
    std::vector<Ordering> out;
    do out.push_back(base);
    while (std::next_permutation(base.begin(), base.end()));
    return out;
}

namespace detail {

inline void interleave(const Ordering& u, const Ordering& v, size_t i, size_t j, Ordering& cur,
                       std::vector<Ordering>& out) {
    if (i == u.size() && j == v.size()) {
        out.push_back(cur);
        return;
    }
    if (i < u.size()) {
        cur.push_back(u[i]);
        interleave(u, v, i + 1, j, cur, out);
        cur.pop_back();
    }
    if (j < v.size()) {
        cur.push_back(v[j]);
        interleave(u, v, i, j + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

// Shuffle product: bilinear extension of summing all interleavings.
inline OrderingVector shuffle_product(const OrderingVector& u, const OrderingVector& v) {
    OrderingVector out;
    for (const auto& [a, ca] : u) {
        std::set<int> syms(a.begin(), a.end());
        for (const auto& [b, cb] : v) {
            for (int s : b)
                if (syms.count(s)) throw std::invalid_argument("shuffle needs disjoint symbol sets");
            std::vector<Ordering> terms;
            Ordering cur;
            detail::interleave(a, b, 0, 0, cur, terms);
            Rational coef = ca * cb;
            for (auto& t : terms) out[t] += coef;
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

// Cycle decomposition in lexicographic normal form: each cycle rotated so its
// lowest symbol leads, cycles sorted by lowest symbol, fixed points kept as
// singletons.
inline std::vector<std::vector<int>> cycle_normal_form(const std::vector<std::vector<int>>& cycles,
                                                       int m) {
    std::vector<bool> used(static_cast<size_t>(m) + 1, false);
    std::vector<std::vector<int>> out;
    for (auto cyc : cycles) {
        if (cyc.empty()) continue;
        for (int v : cyc) {
            if (v < 1 || v > m) throw std::invalid_argument("cycle symbol out of range");
            if (used[static_cast<size_t>(v)]) throw std::invalid_argument("repeated symbol in cycles");
            used[static_cast<size_t>(v)] = true;
        }
        auto lowest = std::min_element(cyc.begin(), cyc.end());
        std::rotate(cyc.begin(), lowest, cyc.end());
        out.push_back(cyc);
    }
    for (int v = 1; v <= m; ++v)
        if (!used[static_cast<size_t>(v)]) out.push_back({v});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return out;
}

// "(12)(345)" -> cycles; single-digit symbols.
inline std::vector<std::vector<int>> parse_cycles(const std::string& text) {
    std::vector<std::vector<int>> cycles;
    std::vector<int> cur;
    bool open = false;
    for (char c : text) {
        if (c == '(') {
            open = true;
            cur.clear();
        } else if (c == ')') {
            if (!open) throw std::invalid_argument("unbalanced cycle notation");
            cycles.push_back(cur);
            open = false;
        } else if (c >= '1' && c <= '9') {
            if (!open) throw std::invalid_argument("symbol outside parentheses");
            cur.push_back(c - '0');
        } else if (c != ' ') {
            throw std::invalid_argument("bad character in cycle notation");
        }
    }
    if (open) throw std::invalid_argument("unbalanced cycle notation");
    return cycles;
}

// Left-nested Lie bracket of a cycle: [c1, c2, ..., cr] with
// [u, v] = uv - vu, extended bilinearly.
inline OrderingVector cycle_bracket(const std::vector<int>& cycle) {
    OrderingVector acc{{{cycle[0]}, Rational(1)}};
    for (size_t i = 1; i < cycle.size(); ++i) {
        OrderingVector next;
        for (const auto& [ord, coef] : acc) {
            Ordering forward = ord;
            forward.push_back(cycle[i]);
            next[forward] += coef;
            Ordering backward{cycle[i]};
            backward.insert(backward.end(), ord.begin(), ord.end());
            next[backward] -= coef;
        }
        acc = std::move(next);
    }
    return acc;
}

// F(pi): bracket each cycle in normal form, then shuffle the results across
// cycles (fixed points enter as singletons). The identity maps to the
// all-ones vector on orderings.
inline OrderingVector lie_shuffle_vector(const std::vector<std::vector<int>>& cycles, int m) {
    if (m > 6) throw resource_cap_error("Lie shuffle vectors capped at m = 6");
    auto normal = cycle_normal_form(cycles, m);
    OrderingVector acc{{{}, Rational(1)}};
    for (const auto& cyc : normal) acc = shuffle_product(acc, cycle_bracket(cyc));
    return acc;
}

// m! x m! integer matrix of Lie shuffle basis coordinates; full rank m!.
inline Matrix lie_basis_matrix(int m) {
    if (m > 5) throw resource_cap_error("Lie basis matrices capped at m = 5");
    auto orderings = all_orderings(m);
    std::map<Ordering, size_t> col;
    for (size_t i = 0; i < orderings.size(); ++i) col[orderings[i]] = i;

    Matrix mat;
    Ordering perm(m);
    std::iota(perm.begin(), perm.end(), 1);
    do {
        // One-line notation -> cycles.
        std::vector<bool> seen(static_cast<size_t>(m) + 1, false);
        std::vector<std::vector<int>> cycles;
        for (int start = 1; start <= m; ++start) {
            if (seen[static_cast<size_t>(start)]) continue;
            std::vector<int> cyc;
            int v = start;
            while (!seen[static_cast<size_t>(v)]) {
                seen[static_cast<size_t>(v)] = true;
                cyc.push_back(v);
                v = perm[static_cast<size_t>(v - 1)];
            }
            cycles.push_back(cyc);
        }
        auto f = lie_shuffle_vector(cycles, m);
        std::vector<Rational> row(orderings.size(), Rational(0));
        for (const auto& [ord, coef] : f) row[col.at(ord)] = coef;
        mat.push_back(std::move(row));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return mat;
}

// An even/odd constraint event pair: disjoint sets of orderings.
struct EventPair {
    std::vector<std::uint8_t> plus;   // indicator over orderings (lex indexed)
    std::vector<std::uint8_t> minus;
};

// Events induced by a cycle's bracket signs: E+ holds when the cycle's
// symbols appear in a +1 pattern of F(c), E- for -1 patterns.
inline EventPair events_from_cycle(const std::vector<int>& cycle, int m) {
    auto bracket = cycle_bracket(cycle);
    auto orderings = all_orderings(m);
    EventPair ev;
    ev.plus.assign(orderings.size(), 0);
    ev.minus.assign(orderings.size(), 0);
    std::set<int> syms(cycle.begin(), cycle.end());
    for (size_t i = 0; i < orderings.size(); ++i) {
        Ordering induced;
        for (int v : orderings[i])
            if (syms.count(v)) induced.push_back(v);
        auto it = bracket.find(induced);
        if (it == bracket.end()) continue;
        if (it->second > 0) ev.plus[i] = 1;
        else ev.minus[i] = 1;
    }
    return ev;
}

// LHS - RHS of the even/odd constraint (EO) for k event pairs under an exact
// distribution on orderings (indexed lexicographically).
inline Rational eo_constraint_residual(const std::vector<Rational>& dist,
                                       const std::vector<EventPair>& events) {
    const size_t n = dist.size();
    const int k = static_cast<int>(events.size());
    if (k < 2) throw std::invalid_argument("need at least 2 event pairs");
    for (const auto& ev : events) {
        if (ev.plus.size() != n || ev.minus.size() != n)
            throw std::invalid_argument("event size mismatch");
        for (size_t i = 0; i < n; ++i)
            if (ev.plus[i] && ev.minus[i]) throw std::invalid_argument("event pair not disjoint");
    }
    Rational lhs(1), rhs(1);
    for (int s = 0; s < (1 << k); ++s) {
        Rational p = 0;
        for (size_t i = 0; i < n; ++i) {
            bool in = true;
            for (int e = 0; e < k && in; ++e)
                in = ((s >> e) & 1) ? events[static_cast<size_t>(e)].plus[i]
                                    : events[static_cast<size_t>(e)].minus[i];
            if (in) p += dist[i];
        }
        if (std::popcount(static_cast<unsigned>(s)) % 2 == 0) lhs *= p;
        else rhs *= p;
    }
    return lhs - rhs;
}

struct GradientCheck {
    bool proportional = false;     // exact scalar-multiple relation
    Rational lambda;               // the scalar, when proportional
    double max_rel_fd_error = 0;   // central finite differences vs analytic
};

// Verifies that the gradient of (EO), with events built from the cycles'
// bracket sign classes, is a scalar multiple of the shuffle of the cycle
// brackets at the uniform distribution.
inline GradientCheck eo_gradient_check(const std::vector<std::vector<int>>& cycles_in, int m) {
    if (m > 5) throw resource_cap_error("gradient checks capped at m = 5");
    auto normal = cycle_normal_form(cycles_in, m);
    std::vector<std::vector<int>> nontrivial;
    for (const auto& c : normal)
        if (c.size() >= 2) nontrivial.push_back(c);
    if (nontrivial.size() < 2) throw std::invalid_argument("need at least 2 nontrivial cycles");

    const int k = static_cast<int>(nontrivial.size());
    std::vector<EventPair> events;
    for (const auto& c : nontrivial) events.push_back(events_from_cycle(c, m));
    auto orderings = all_orderings(m);
    const size_t n = orderings.size();

    // Membership of each ordering in each signed conjunction.
    std::vector<Rational> prob(static_cast<size_t>(1) << k, Rational(0));
    std::vector<std::vector<int>> member(n);
    Rational unif = rat(1, static_cast<long>(n));
    for (size_t i = 0; i < n; ++i) {
        for (int s = 0; s < (1 << k); ++s) {
            bool in = true;
            for (int e = 0; e < k && in; ++e)
                in = ((s >> e) & 1) ? events[static_cast<size_t>(e)].plus[i]
                                    : events[static_cast<size_t>(e)].minus[i];
            if (in) {
                prob[static_cast<size_t>(s)] += unif;
                member[i].push_back(s);
            }
        }
    }
    auto grad = [&](size_t i) {
        Rational total = 0;
        for (int s : member[i]) {
            bool even = std::popcount(static_cast<unsigned>(s)) % 2 == 0;
            Rational prod(1);
            for (int s2 = 0; s2 < (1 << k); ++s2) {
                if (s2 == s) continue;
                bool even2 = std::popcount(static_cast<unsigned>(s2)) % 2 == 0;
                if (even2 == even) prod *= prob[static_cast<size_t>(s2)];
            }
            total += even ? prod : -prod;
        }
        return total;
    };

    std::vector<Rational> gradient(n);
    for (size_t i = 0; i < n; ++i) gradient[i] = grad(i);

    auto shuffle_vec = lie_shuffle_vector(nontrivial, m);
    std::map<Ordering, size_t> col;
    for (size_t i = 0; i < n; ++i) col[orderings[i]] = i;
    std::vector<Rational> target(n, Rational(0));
    for (const auto& [ord, coef] : shuffle_vec) target[col.at(ord)] = coef;

    GradientCheck out;
    Rational lambda = 0;
    bool ok = true;
    for (size_t i = 0; i < n && ok; ++i) {
        if (target[i] == 0) {
            if (gradient[i] != 0) ok = false;
        } else {
            Rational ratio = gradient[i] / target[i];
            if (lambda == 0) lambda = ratio;
            else if (ratio != lambda) ok = false;
        }
    }
    out.proportional = ok && lambda != 0;
    out.lambda = lambda;

    // Central finite differences in floating point as an independent check.
    auto q_of = [&](const std::vector<double>& x) {
        double lhs = 1, rhs = 1;
        for (int s = 0; s < (1 << k); ++s) {
            double p = 0;
            for (size_t i = 0; i < n; ++i) {
                bool in = true;
                for (int e = 0; e < k && in; ++e)
                    in = ((s >> e) & 1) ? events[static_cast<size_t>(e)].plus[i]
                                        : events[static_cast<size_t>(e)].minus[i];
                if (in) p += x[i];
            }
            if (std::popcount(static_cast<unsigned>(s)) % 2 == 0) lhs *= p;
            else rhs *= p;
        }
        return lhs - rhs;
    };
    const double h = 1e-6;
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    double max_rel = 0;
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double fd = (q_of(xp) - q_of(xm)) / (2 * h);
        double an = gradient[i].get_d();
        double scale = std::max(std::fabs(an), 1e-9);
        max_rel = std::max(max_rel, std::fabs(fd - an) / scale);
    }
    out.max_rel_fd_error = max_rel;
    return out;
}

// Row-streamed rank over a large prime field, optionally stopping at a
// target. Since rank can only drop under reduction mod p, this is a certified
// lower bound on the rational rank, which is exactly what the dimension
// lower bound needs; it keeps the large stretch matrices (m = 6, 7) in
// machine words.
inline int streamed_rank_mod_p(const std::vector<std::vector<Integer>>& rows, int stop_at = -1,
                               std::uint64_t p = 2305843009213693951ULL /* 2^61 - 1 */) {
    auto mulmod = [p](std::uint64_t a, std::uint64_t b) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
    };
    auto powmod = [&](std::uint64_t a, std::uint64_t e) {
        std::uint64_t r = 1;
        while (e) {
            if (e & 1) r = mulmod(r, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return r;
    };
    struct BasisRow {
        size_t pivot;
        std::vector<std::uint64_t> values;
    };
    std::vector<BasisRow> basis;
    for (const auto& int_row : rows) {
        std::vector<std::uint64_t> row(int_row.size());
        for (size_t i = 0; i < int_row.size(); ++i)
            row[i] = mpz_fdiv_ui(int_row[i].get_mpz_t(), p);
        for (const auto& b : basis) {
            std::uint64_t f = row[b.pivot];
            if (f == 0) continue;
            for (size_t i = 0; i < row.size(); ++i) {
                std::uint64_t sub = mulmod(f, b.values[i]);
                row[i] = row[i] >= sub ? row[i] - sub : row[i] + p - sub;
            }
        }
        size_t pivot = row.size();
        for (size_t i = 0; i < row.size(); ++i)
            if (row[i] != 0) { pivot = i; break; }
        if (pivot == row.size()) continue;
        std::uint64_t inv = powmod(row[pivot], p - 2);
        for (auto& v : row) v = mulmod(v, inv);
        basis.push_back({pivot, std::move(row)});
        if (stop_at > 0 && static_cast<int>(basis.size()) >= stop_at) break;
    }
    return static_cast<int>(basis.size());
}

struct DimBounds {
    int m = 0;
    Integer upper;   // C(m)
    long lower = 0;  // rank(draw matrix) - 1
    std::string word;
};

// Upper bound C(m) against the draw-matrix rank lower bound. Without a word
// the search tries a few deterministic pseudorandom words, starting at length
// about 1.1 C(m) + m and growing. m = 6 takes minutes and m = 7 is a
// resource-bound stretch, so both sit behind the `stretch` switch.
inline DimBounds dim_bounds_report(int m, std::optional<std::string> word = std::nullopt,
                                   bool stretch = false) {
    if (m < 1) throw std::invalid_argument("need m >= 1");
    if (m > (stretch ? 7 : 5))
        throw resource_cap_error(m <= 7 ? "m > 5 needs the stretch switch" : "rank computation capped at m = 7");
    DimBounds out;
    out.m = m;
    out.upper = pure_cycle_count(m);
    if (m == 1) {
        out.lower = 0;
        out.word = "a";
        return out;
    }
    int stop_at = static_cast<int>(out.upper.get_si()) + 1;
    auto try_word = [&](const std::string& w) {
        // m >= 6 uses the modular lower bound; it cannot overstate the rank.
        int rank = m >= 6 ? streamed_rank_mod_p(draw_matrix(w), stop_at) : rational_rank(draw_matrix(w));
        if (rank - 1 > out.lower) {
            out.lower = rank - 1;
            out.word = w;
        }
    };
    if (word) {
        try_word(*word);
        return out;
    }
    // Start at the documented default length of about 1.1 C(m) + m and grow;
    // short random words are often rank-deficient, so later attempts
    // lengthen. The stretch sizes jump straight to the length that saturates.
    long target_len = static_cast<long>(std::ceil((m >= 6 ? 2.0 : 1.1) * out.upper.get_d())) + m;
    for (int attempt = 0; attempt < 12 && Integer(out.lower) < out.upper; ++attempt) {
        SplitMix64 rng(static_cast<std::uint64_t>(m) * 1000003ULL + static_cast<std::uint64_t>(attempt));
        std::string w;
        for (int i = 0; i < m; ++i) w += char('a' + i);  // every symbol present
        while (static_cast<long>(w.size()) < target_len)
            w += char('a' + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m))));
        try_word(w);
        if (attempt % 3 == 2) target_len = target_len * 4 / 3 + 1;
    }
    return out;
}

}  // namespace treeprob
