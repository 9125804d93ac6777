#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "treeprob/errors.hpp"
#include "treeprob/linalg.hpp"
#include "treeprob/rational.hpp"

namespace treeprob {

// Weighted word over symbols 'a'.. : every draw picks one position per
// symbol (probability proportional to weight) and reads the symbols in
// position order, inducing a distribution on orderings.
struct WordMap {
    std::string word;
    std::vector<Rational> weights;

    WordMap() = default;
    WordMap(std::string w, std::vector<Rational> wt) : word(std::move(w)), weights(std::move(wt)) {
        validate();
    }

    static WordMap with_unit_weights(std::string w) {
        std::vector<Rational> wt(w.size(), Rational(1));
        return WordMap(std::move(w), std::move(wt));
    }

    int symbol_count() const {
        int m = 0;
        for (char c : word) m = std::max(m, c - 'a' + 1);
        return m;
    }

    void validate() const {
        if (word.empty()) throw std::invalid_argument("empty word");
        if (word.size() != weights.size()) throw std::invalid_argument("weights must match word length");
        int m = 0;
        for (char c : word) {
            if (c < 'a' || c > 'z') throw std::invalid_argument("symbols must be a..z");
            m = std::max(m, c - 'a' + 1);
        }
        std::vector<Rational> totals(m, Rational(0));
        for (size_t i = 0; i < word.size(); ++i) {
            if (weights[i] < 0) throw std::invalid_argument("negative weight");
            totals[word[i] - 'a'] += weights[i];
        }
        for (int s = 0; s < m; ++s)
            if (totals[s] == 0)
                throw std::invalid_argument(std::string("symbol ") + char('a' + s) +
                                            " has zero total weight");
    }

    std::vector<Rational> symbol_totals() const {
        std::vector<Rational> totals(symbol_count(), Rational(0));
        for (size_t i = 0; i < word.size(); ++i) totals[word[i] - 'a'] += weights[i];
        return totals;
    }
};

using OrderDistribution = std::map<std::string, Rational>;

inline std::vector<std::string> all_ordering_strings(int m) {
    std::string base;
    for (int i = 0; i < m; ++i) base += char('a' + i);
    std::vector<std::string> out;
    do out.push_back(base);
    while (std::next_permutation(base.begin(), base.end()));
    return out;
}

// Exact induced distribution on orderings: subsequence-weight dynamic
// programming per ordering.
inline OrderDistribution word_distribution(const WordMap& wm) {
    wm.validate();
    const int m = wm.symbol_count();
    if (m > 7) throw resource_cap_error("word distributions capped at 7 symbols");
    auto totals = wm.symbol_totals();
    std::vector<Rational> norm(wm.word.size());
    for (size_t i = 0; i < wm.word.size(); ++i) norm[i] = wm.weights[i] / totals[wm.word[i] - 'a'];

    OrderDistribution out;
    for (const auto& sigma : all_ordering_strings(m)) {
        std::vector<Rational> f(static_cast<size_t>(m) + 1, Rational(0));
        f[0] = 1;
        for (size_t p = 0; p < wm.word.size(); ++p) {
            if (wm.weights[p] == 0) continue;
            char c = wm.word[p];
            for (int j = m - 1; j >= 0; --j)
                if (sigma[static_cast<size_t>(j)] == c && f[static_cast<size_t>(j)] != 0)
                    f[static_cast<size_t>(j) + 1] += f[static_cast<size_t>(j)] * norm[p];
        }
        out[sigma] = f[static_cast<size_t>(m)];
    }
    return out;
}

inline OrderDistribution uniform_order_distribution(int m) {
    OrderDistribution out;
    Rational p = rat(1, static_cast<long>(factorial(static_cast<unsigned>(m)).get_si()));
    for (const auto& sigma : all_ordering_strings(m)) out[sigma] = p;
    return out;
}

// Draw matrix: rows indexed by word positions, columns by orderings in
// lexicographic order; entry (i, sigma) counts length-m subsequences spelling
// sigma that use position i.
inline std::vector<std::vector<Integer>> draw_matrix(const std::string& word) {
    WordMap probe = WordMap::with_unit_weights(word);  // validates symbol coverage
    const int m = probe.symbol_count();
    if (m > 7) throw resource_cap_error("draw matrices capped at 7 symbols");
    const size_t r = word.size();
    auto orderings = all_ordering_strings(m);
    std::vector<std::vector<Integer>> mat(r, std::vector<Integer>(orderings.size(), Integer(0)));
    for (size_t col = 0; col < orderings.size(); ++col) {
        const std::string& sigma = orderings[col];
        // prefix[i][k]: subsequences of word[0..i) spelling sigma[0..k)
        std::vector<std::vector<Integer>> prefix(r + 1, std::vector<Integer>(m + 1, Integer(0)));
        for (size_t i = 0; i <= r; ++i) prefix[i][0] = 1;
        for (size_t i = 1; i <= r; ++i)
            for (int k = 1; k <= m; ++k) {
                prefix[i][k] = prefix[i - 1][k];
                if (word[i - 1] == sigma[static_cast<size_t>(k - 1)])
                    prefix[i][k] += prefix[i - 1][k - 1];
            }
        std::vector<std::vector<Integer>> suffix(r + 2, std::vector<Integer>(m + 2, Integer(0)));
        for (size_t i = 0; i <= r + 1; ++i) suffix[i][m + 1] = 1;
        for (size_t i = r; i >= 1; --i)
            for (int k = m; k >= 1; --k) {
                suffix[i][k] = suffix[i + 1][k];
                if (word[i - 1] == sigma[static_cast<size_t>(k - 1)])
                    suffix[i][k] += suffix[i + 1][k + 1];
            }
        for (size_t i = 1; i <= r; ++i) {
            Integer total(0);
            for (int k = 1; k <= m; ++k)
                if (word[i - 1] == sigma[static_cast<size_t>(k - 1)])
                    total += prefix[i - 1][k - 1] * suffix[i + 1][k + 1];
            mat[i - 1][col] = total;
        }
    }
    return mat;
}

inline int rational_rank(const std::vector<std::vector<Integer>>& m) {
    Matrix q(m.size());
    for (size_t i = 0; i < m.size(); ++i) {
        q[i].resize(m[i].size());
        for (size_t j = 0; j < m[i].size(); ++j) q[i][j] = Rational(m[i][j]);
    }
    return rational_rank(std::move(q));
}

// Caratheodory reduction: per symbol, while the conditional distributions of
// its positions are affinely dependent, move mass along a dependency until a
// position zeroes out. The induced distribution is preserved exactly and at
// most m! positions per symbol survive.
inline WordMap shorten_word_map(const WordMap& wm_in) {
    WordMap wm = wm_in;
    wm.validate();
    const int m = wm.symbol_count();
    if (m > 5) throw resource_cap_error("shortening capped at 5 symbols");
    auto orderings = all_ordering_strings(m);

    auto conditional = [&](int pos) {
        WordMap mod = wm;
        char sym = wm.word[static_cast<size_t>(pos)];
        for (size_t i = 0; i < mod.word.size(); ++i)
            if (mod.word[i] == sym) mod.weights[i] = (static_cast<int>(i) == pos) ? 1 : 0;
        auto dist = word_distribution(mod);
        std::vector<Rational> vec;
        vec.reserve(orderings.size() + 1);
        for (const auto& sigma : orderings) vec.push_back(dist[sigma]);
        vec.push_back(1);
        return vec;
    };

    for (char sym = 'a'; sym < 'a' + m; ++sym) {
        for (;;) {
            std::vector<int> positions;
            for (size_t i = 0; i < wm.word.size(); ++i)
                if (wm.word[i] == sym && wm.weights[i] > 0) positions.push_back(static_cast<int>(i));
            if (positions.size() <= 1) break;
            std::vector<std::vector<Rational>> cols;
            for (int p : positions) cols.push_back(conditional(p));
            auto c = kernel_vector(cols);
            if (c.empty()) break;  // affinely independent already
            bool has_negative = false;
            for (const auto& v : c)
                if (v < 0) has_negative = true;
            if (!has_negative)
                for (auto& v : c) v = -v;
            Rational total = 0;
            for (int p : positions) total += wm.weights[static_cast<size_t>(p)];
            std::optional<Rational> best;
            for (size_t j = 0; j < positions.size(); ++j) {
                if (c[j] >= 0) continue;
                Rational q = wm.weights[static_cast<size_t>(positions[j])] / total;
                Rational step = q / -c[j];
                if (!best || step < *best) best = step;
            }
            for (size_t j = 0; j < positions.size(); ++j) {
                Rational q = wm.weights[static_cast<size_t>(positions[j])] / total;
                wm.weights[static_cast<size_t>(positions[j])] = (q + *best * c[j]) * total;
            }
        }
    }
    // Drop zeroed positions.
    std::string word;
    std::vector<Rational> weights;
    for (size_t i = 0; i < wm.word.size(); ++i) {
        if (wm.weights[i] == 0) continue;
        word += wm.word[i];
        weights.push_back(wm.weights[i]);
    }
    return WordMap(std::move(word), std::move(weights));
}

// Cyclic word long enough that any word map on m symbols with at most m!
// copies per symbol embeds as a subsequence: length (m!) m (m-1) + 1.
inline std::string universal_word(int m) {
    if (m < 2 || m > 7) throw std::invalid_argument("universal words supported for 2 <= m <= 7");
    long len = factorial(static_cast<unsigned>(m)).get_si() * m * (m - 1) + 1;
    std::string out;
    out.reserve(static_cast<size_t>(len));
    for (long i = 0; i < len; ++i) out += char('a' + (i % m));
    return out;
}

// v_{m,m}: concatenation over all permutations (lexicographic) of the
// relabeled previous word; unit weights, exactly uniform.
inline WordMap uniform_word_recursive(int m) {
    if (m < 1) throw std::invalid_argument("need m >= 1");
    if (m > 4) throw resource_cap_error("length cap: recursive uniform words grow as m (m!)^(m-1)");
    std::string v;
    for (int i = 0; i < m; ++i) v += char('a' + i);
    for (int k = 2; k <= m; ++k) {
        std::string prev = v;
        std::string perm;
        for (int i = 0; i < m; ++i) perm += char('a' + i);
        std::string next;
        do {
            for (char c : prev) next += perm[static_cast<size_t>(c - 'a')];
        } while (std::next_permutation(perm.begin(), perm.end()));
        v = std::move(next);
    }
    return WordMap::with_unit_weights(v);
}

// Restriction of a word to a symbol subset (used to spot-check very long
// uniform words on a subset of their letters).
inline WordMap restrict_word(const WordMap& wm, const std::string& symbols) {
    std::string word;
    std::vector<Rational> weights;
    std::string sorted = symbols;
    std::sort(sorted.begin(), sorted.end());
    std::map<char, char> relabel;
    for (size_t i = 0; i < sorted.size(); ++i) relabel[sorted[i]] = char('a' + i);
    for (size_t i = 0; i < wm.word.size(); ++i) {
        auto it = relabel.find(wm.word[i]);
        if (it == relabel.end()) continue;
        word += it->second;
        weights.push_back(wm.weights[i]);
    }
    return WordMap(std::move(word), std::move(weights));
}

struct UniformWord {
    std::string word;
    std::vector<Rational> weights;        // exact when `exact`
    std::vector<double> weights_approx;   // always populated
    bool exact = false;
};

// L(m) from the quadrature construction: 1, 3, 8, 19, 60, 184, 740, ...
inline std::vector<long> quadrature_word_lengths(int max_m) {
    std::vector<long> out{1};
    for (int m = 2; m <= max_m; ++m) {
        long prev = out.back();
        long next = (m % 2 == 1) ? ((m + 1) / 2) * prev + (m + 1) / 2 : (m / 2) * prev + (m + 2) / 2;
        out.push_back(next);
    }
    return out;
}

namespace detail {

template <class Num>
struct QuadScheme {
    std::vector<Num> nodes;    // increasing, in [0,1]
    std::vector<Num> weights;  // positive, summing to 1
};

// Word for m symbols from schemes[j] used at step j (j = 2..m): blocks of the
// previous word scaled by node gaps, interleaved with the new letter carrying
// the scheme weights. Zero-width end blocks vanish, which is what makes
// Radau/Lobatto nodes efficient.
template <class Num>
std::pair<std::string, std::vector<Num>> build_quadrature_word(
    int m, const std::vector<QuadScheme<Num>>& schemes) {
    std::string word = "a";
    std::vector<Num> weights{Num(1)};
    for (int j = 2; j <= m; ++j) {
        const auto& sch = schemes[static_cast<size_t>(j - 2)];
        const char letter = char('a' + j - 1);
        std::string next_word;
        std::vector<Num> next_weights;
        auto append_block = [&](const Num& width) {
            if (width == Num(0)) return;
            for (size_t i = 0; i < word.size(); ++i) {
                next_word += word[i];
                next_weights.push_back(weights[i] * width);
            }
        };
        Num prev_node(0);
        for (size_t i = 0; i < sch.nodes.size(); ++i) {
            append_block(sch.nodes[i] - prev_node);
            next_word += letter;
            next_weights.push_back(sch.weights[i]);
            prev_node = sch.nodes[i];
        }
        append_block(Num(1) - prev_node);
        word = std::move(next_word);
        weights = std::move(next_weights);
    }
    return {word, weights};
}

// Degree-4 Gauss-Radau scheme on [0,1] with a node at 0, solved from the
// moment equations by Newton iteration.
inline QuadScheme<double> radau3_scheme() {
    double x2 = 0.35, x3 = 0.85, w1 = 0.12, w2 = 0.65, w3 = 0.23;
    for (int it = 0; it < 200; ++it) {
        // Residuals of sum w_i x_i^p = 1/(p+1), p = 0..4, with x1 = 0.
        double f[5], x2p[5], x3p[5];
        x2p[0] = x3p[0] = 1;
        for (int p = 1; p < 5; ++p) {
            x2p[p] = x2p[p - 1] * x2;
            x3p[p] = x3p[p - 1] * x3;
        }
        for (int p = 0; p < 5; ++p)
            f[p] = w1 * (p == 0 ? 1.0 : 0.0) + w2 * x2p[p] + w3 * x3p[p] - 1.0 / (p + 1);
        double jac[5][5];
        for (int p = 0; p < 5; ++p) {
            jac[p][0] = (p == 0 ? 1.0 : 0.0);
            jac[p][1] = x2p[p];
            jac[p][2] = x3p[p];
            jac[p][3] = p == 0 ? 0.0 : w2 * p * x2p[p - 1];
            jac[p][4] = p == 0 ? 0.0 : w3 * p * x3p[p - 1];
        }
        // Solve jac * delta = f.
        double a[5][6];
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) a[i][j] = jac[i][j];
            a[i][5] = f[i];
        }
        for (int col = 0; col < 5; ++col) {
            int piv = col;
            for (int r2 = col + 1; r2 < 5; ++r2)
                if (std::fabs(a[r2][col]) > std::fabs(a[piv][col])) piv = r2;
            std::swap(a[piv], a[col]);
            for (int r2 = 0; r2 < 5; ++r2) {
                if (r2 == col || a[r2][col] == 0) continue;
                double fac = a[r2][col] / a[col][col];
                for (int c2 = col; c2 < 6; ++c2) a[r2][c2] -= fac * a[col][c2];
            }
        }
        double d[5];
        for (int i = 0; i < 5; ++i) d[i] = a[i][5] / a[i][i];
        w1 -= d[0];
        w2 -= d[1];
        w3 -= d[2];
        x2 -= d[3];
        x3 -= d[4];
        if (std::fabs(d[0]) + std::fabs(d[1]) + std::fabs(d[2]) + std::fabs(d[3]) + std::fabs(d[4]) <
            1e-15)
            break;
    }
    QuadScheme<double> sch;
    sch.nodes = {0.0, x2, x3};
    sch.weights = {w1, w2, w3};
    double residual = 0;
    for (int p = 0; p < 5; ++p) {
        double s = 0;
        for (size_t i = 0; i < 3; ++i) s += sch.weights[i] * std::pow(sch.nodes[i], p);
        residual = std::max(residual, std::fabs(s - 1.0 / (p + 1)));
    }
    if (residual > 1e-12) throw std::runtime_error("Radau scheme residual too large");
    return sch;
}

}  // namespace detail

// Uniform words from quadrature schemes (Table of lengths 1, 3, 8, 19, 60).
// Rational and exactly uniform through m = 4; the m = 5 scheme has irrational
// nodes, so its weights are delivered in floating point.
inline UniformWord uniform_word_quadrature(int m) {
    if (m < 1 || m > 5) throw std::invalid_argument("quadrature words supported for 1 <= m <= 5");
    UniformWord out;
    if (m <= 4) {
        std::vector<detail::QuadScheme<Rational>> schemes;
        if (m >= 2) schemes.push_back({{rat(0), rat(1)}, {rat(1, 2), rat(1, 2)}});
        if (m >= 3) schemes.push_back({{rat(0), rat(2, 3)}, {rat(1, 4), rat(3, 4)}});
        if (m >= 4) schemes.push_back({{rat(0), rat(1, 2), rat(1)}, {rat(1, 6), rat(2, 3), rat(1, 6)}});
        auto [word, weights] = detail::build_quadrature_word<Rational>(m, schemes);
        out.word = word;
        out.weights = weights;
        out.exact = true;
        for (const auto& w : weights) out.weights_approx.push_back(w.get_d());
        return out;
    }
    std::vector<detail::QuadScheme<double>> schemes;
    schemes.push_back({{0.0, 1.0}, {0.5, 0.5}});
    schemes.push_back({{0.0, 2.0 / 3.0}, {0.25, 0.75}});
    schemes.push_back({{0.0, 0.5, 1.0}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}});
    schemes.push_back(detail::radau3_scheme());
    auto [word, weights] = detail::build_quadrature_word<double>(m, schemes);
    out.word = word;
    out.weights_approx = weights;
    out.exact = false;
    return out;
}

// Floating point induced distribution (used for the irrational m = 5 word).
inline std::map<std::string, double> word_distribution_double(const std::string& word,
                                                              const std::vector<double>& weights) {
    int m = 0;
    for (char c : word) m = std::max(m, c - 'a' + 1);
    std::vector<double> totals(static_cast<size_t>(m), 0.0);
    for (size_t i = 0; i < word.size(); ++i) totals[static_cast<size_t>(word[i] - 'a')] += weights[i];
    std::map<std::string, double> out;
    for (const auto& sigma : all_ordering_strings(m)) {
        std::vector<double> f(static_cast<size_t>(m) + 1, 0.0);
        f[0] = 1;
        for (size_t p = 0; p < word.size(); ++p) {
            double nw = weights[p] / totals[static_cast<size_t>(word[p] - 'a')];
            for (int j = m - 1; j >= 0; --j)
                if (sigma[static_cast<size_t>(j)] == word[p]) f[static_cast<size_t>(j) + 1] += f[static_cast<size_t>(j)] * nw;
        }
        out[sigma] = f[static_cast<size_t>(m)];
    }
    return out;
}

// Exact check that k draws of symbol 'a' and l draws of symbol 'b' under the
// word map's per-symbol measures realize all C(k+l, l) interleavings equally.
inline bool kl_uniform_check(const WordMap& wm, int k, int l) {
    wm.validate();
    if (wm.symbol_count() != 2) throw std::invalid_argument("needs a word on exactly 2 symbols");
    if (k < 1 || l < 1 || k + l > 8) throw std::invalid_argument("need k, l >= 1 and k + l <= 8");
    auto totals = wm.symbol_totals();

    // Enumerate patterns as strings of k 'a's and l 'b's.
    std::string pattern(static_cast<size_t>(k), 'a');
    pattern.append(static_cast<size_t>(l), 'b');
    std::sort(pattern.begin(), pattern.end());
    std::vector<std::string> patterns;
    do patterns.push_back(pattern);
    while (std::next_permutation(pattern.begin(), pattern.end()));

    Integer total_patterns = binomial(static_cast<unsigned>(k + l), static_cast<unsigned>(l));
    Rational expected = rat(Integer(1), total_patterns);

    for (const auto& pat : patterns) {
        // DP over word positions: state = (draws of a placed, draws of b placed).
        // Draws landing at one position sit adjacently in the realized
        // pattern, so placing cnt copies of sym claims the next cnt slots.
        std::map<std::pair<int, int>, Rational> state{{{0, 0}, Rational(1)}};
        for (size_t pos = 0; pos < wm.word.size(); ++pos) {
            char sym = wm.word[pos];
            Rational q = wm.weights[pos] / totals[static_cast<size_t>(sym - 'a')];
            if (q == 0) continue;
            int limit = sym == 'a' ? k : l;
            std::map<std::pair<int, int>, Rational> next;
            for (const auto& [st, val] : state) {
                auto [ac, bc] = st;
                next[st] += val;
                int placed = sym == 'a' ? ac : bc;
                Rational qpow = 1;
                for (int cnt = 1; placed + cnt <= limit; ++cnt) {
                    if (pat[static_cast<size_t>(ac + bc + cnt - 1)] != sym) break;
                    qpow *= q;
                    Rational coeff(binomial(static_cast<unsigned>(limit - placed),
                                            static_cast<unsigned>(cnt)));
                    std::pair<int, int> key = sym == 'a' ? std::pair<int, int>{ac + cnt, bc}
                                                         : std::pair<int, int>{ac, bc + cnt};
                    next[key] += val * coeff * qpow;
                }
            }
            state = std::move(next);
        }
        auto it = state.find({k, l});
        Rational p = it == state.end() ? Rational(0) : it->second;
        if (p != expected) return false;
    }
    return true;
}

}  // namespace treeprob
