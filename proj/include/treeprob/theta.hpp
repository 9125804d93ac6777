#pragma once

#include <array>
#include <optional>

#include "treeprob/shifts.hpp"

namespace treeprob {

// Per-tree MST0 probability of a tree of R type in theta(r,s,t), from the
// external formula: order the two missing edges and take 1/|D_1| * 1/|D_2|.
inline Rational theta_mst0_tree_prob(int r, int s, int t) {
    long m = r + s + t;
    return (rat(1, r + s) + rat(1, r + t)) / Rational(m);
}

inline Rational theta_mst0_type_prob(int r, int s, int t) {
    return theta_mst0_tree_prob(r, s, t) * Rational(static_cast<long>(s) * t);
}

inline Rational theta_ust_type_prob(int r, int s, int t) {
    long d = static_cast<long>(s) * t + static_cast<long>(r) * t + static_cast<long>(r) * s;
    return rat(static_cast<long>(s) * t, d);
}

// The displayed closed form for u_R - m_R (assumes r >= s >= t). It does not
// match either the per-type or per-tree difference; only its sign claim is
// relied on. Both direct readings are exposed alongside for comparison.
inline Rational theta_u_minus_m_display(int r, int s, int t) {
    long num = static_cast<long>(r) * s * t;
    Rational top = Rational(num) * Rational(static_cast<long>(r) * r - static_cast<long>(s) * t);
    Rational bottom = Rational(static_cast<long>(r + s)) * Rational(static_cast<long>(r + t)) *
                      Rational(static_cast<long>(r) * s + static_cast<long>(r) * t + static_cast<long>(s) * t);
    return top / bottom;
}

inline Rational theta_u_minus_m_per_type(int r, int s, int t) {
    return theta_ust_type_prob(r, s, t) - theta_mst0_type_prob(r, s, t);
}

inline Rational theta_u_minus_m_per_tree(int r, int s, int t) {
    long d = static_cast<long>(s) * t + static_cast<long>(r) * t + static_cast<long>(r) * s;
    return rat(1, d) - theta_mst0_tree_prob(r, s, t);
}

namespace detail {

// CDF of the maximum of k i.i.d. uniforms on [a, a+1], as a polynomial on a
// grid cell [lo, hi] known to avoid straddling a or a+1.
inline Poly max_cdf_poly(int k, const Rational& a, const Rational& lo) {
    if (lo < a) return Poly{Rational(0)};
    if (lo >= a + 1) return Poly{Rational(1)};
    // (x - a)^k expanded.
    Poly base{-a, Rational(1)};
    Poly out{Rational(1)};
    for (int i = 0; i < k; ++i) out = poly_mul(out, base);
    return out;
}

inline Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return Poly{Rational(0)};
    Poly out(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * Rational(static_cast<long>(i));
    return out;
}

}  // namespace detail

// Exact type probabilities (P_R, P_S, P_T) of shifted-interval MST on
// theta(r,s,t) with per-path shifts (alpha, beta, gamma). The tree type is
// decided by which path maximum is smallest, so a single one-dimensional
// piecewise-polynomial integral per type suffices. Cross-checked against the
// full order-integration engine in the tests.
inline std::array<Rational, 3> theta_type_probs_shifted(int r, int s, int t, const Rational& alpha,
                                                        const Rational& beta, const Rational& gamma) {
    std::array<int, 3> len{r, s, t};
    std::array<Rational, 3> shift{alpha, beta, gamma};
    std::vector<Rational> grid;
    for (const auto& a : shift) {
        grid.push_back(a);
        grid.push_back(a + 1);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::array<Rational, 3> probs{Rational(0), Rational(0), Rational(0)};
    for (int which = 0; which < 3; ++which) {
        Rational acc = 0;
        for (size_t c = 0; c + 1 < grid.size(); ++c) {
            Poly f = detail::poly_derivative(detail::max_cdf_poly(len[which], shift[which], grid[c]));
            if (poly_is_zero(f)) continue;
            Poly integrand = f;
            for (int other = 0; other < 3; ++other) {
                if (other == which) continue;
                Poly survivor{Rational(1)};
                Poly cdf = detail::max_cdf_poly(len[other], shift[other], grid[c]);
                Poly one_minus(cdf.size(), Rational(0));
                one_minus[0] = 1;
                for (size_t i = 0; i < cdf.size(); ++i) one_minus[i] -= cdf[i];
                integrand = poly_mul(integrand, one_minus);
            }
            acc += poly_definite_integral(integrand, grid[c], grid[c + 1]);
        }
        probs[which] = acc;
    }
    return probs;
}

struct ThetaReport {
    int r, s, t;
    Integer tree_count;
    std::array<Rational, 3> mst0_type;   // probabilities of R/S/T type under MST0
    std::array<Rational, 3> mst0_tree;   // per-tree values within each type
    std::array<Rational, 3> ust_type;
    Rational ust_tree;
    std::optional<std::array<Rational, 3>> shifted_type;  // present when shifts given
};

inline ThetaReport theta_report(int r, int s, int t,
                                std::optional<std::array<Rational, 3>> shifts = std::nullopt) {
    if (r < 1 || s < 1 || t < 1) throw std::invalid_argument("theta path lengths must be positive");
    ThetaReport rep{r, s, t, Integer(0), {}, {}, {}, Rational(0), std::nullopt};
    long d = static_cast<long>(s) * t + static_cast<long>(r) * t + static_cast<long>(r) * s;
    rep.tree_count = d;
    rep.mst0_type = {theta_mst0_type_prob(r, s, t), theta_mst0_type_prob(s, r, t),
                     theta_mst0_type_prob(t, s, r)};
    rep.mst0_tree = {theta_mst0_tree_prob(r, s, t), theta_mst0_tree_prob(s, r, t),
                     theta_mst0_tree_prob(t, s, r)};
    rep.ust_type = {theta_ust_type_prob(r, s, t), theta_ust_type_prob(s, r, t),
                    theta_ust_type_prob(t, s, r)};
    rep.ust_tree = rat(1, d);
    if (shifts) {
        if (r + s + t > 8) throw resource_cap_error("exact shifted theta capped at r+s+t = 8");
        // Full order-integration route; the solver's closed-form evaluator is
        // the independent cross-check (they are pinned equal in the tests).
        Graph g = theta_graph(r, s, t);
        ShiftVector sv;
        for (int i = 0; i < r; ++i) sv.push_back((*shifts)[0]);
        for (int i = 0; i < s; ++i) sv.push_back((*shifts)[1]);
        for (int i = 0; i < t; ++i) sv.push_back((*shifts)[2]);
        auto dist = shift_tree_distribution(g, sv);
        std::array<Rational, 3> type{Rational(0), Rational(0), Rational(0)};
        std::array<int, 3> lens{r, s, t};
        for (const auto& [tree, p] : dist) {
            int offset = 0;
            for (int which = 0; which < 3; ++which) {
                bool all = true;
                for (int e = offset; e < offset + lens[static_cast<size_t>(which)]; ++e)
                    if (std::find(tree.begin(), tree.end(), e) == tree.end()) all = false;
                if (all) type[static_cast<size_t>(which)] += p;
                offset += lens[static_cast<size_t>(which)];
            }
        }
        rep.shifted_type = type;
    }
    return rep;
}

// Finds per-path shifts recovering UST on theta(r,s,t) by nested bisection:
// the inner loop pins P_S to its target by moving beta, the outer loop moves
// alpha until P_R matches. Every evaluation is an exact rational at a
// rational trial point. Returns shifts normalized to minimum zero.
inline std::array<Rational, 3> solve_theta_ust_shift(int r, int s, int t, int max_iter = 64,
                                                     const Rational& tv_target = rat(1, 1000000000L)) {
    if (r + s + t > 8) throw resource_cap_error("exact shifted theta capped at r+s+t = 8");
    if (r == s && s == t) return {Rational(0), Rational(0), Rational(0)};
    std::array<Rational, 3> target{theta_ust_type_prob(r, s, t), theta_ust_type_prob(s, r, t),
                                   theta_ust_type_prob(t, s, r)};

    auto solve_beta = [&](const Rational& alpha) -> Rational {
        Rational lo = -3, hi = 3;
        for (int i = 0; i < max_iter; ++i) {
            Rational mid = (lo + hi) / 2;
            auto p = theta_type_probs_shifted(r, s, t, alpha, mid, Rational(0));
            if (p[1] > target[1]) lo = mid;  // P_S decreasing in beta
            else hi = mid;
        }
        return (lo + hi) / 2;
    };

    Rational alo = -3, ahi = 3;
    for (int i = 0; i < max_iter; ++i) {
        Rational mid = (alo + ahi) / 2;
        Rational beta = solve_beta(mid);
        auto p = theta_type_probs_shifted(r, s, t, mid, beta, Rational(0));
        if (p[0] > target[0]) alo = mid;  // P_R decreasing in alpha
        else ahi = mid;
    }
    Rational alpha = (alo + ahi) / 2;
    Rational beta = solve_beta(alpha);
    std::array<Rational, 3> shifts{alpha, beta, Rational(0)};
    Rational lowest = std::min(std::min(shifts[0], shifts[1]), shifts[2]);
    for (auto& v : shifts) v -= lowest;

    auto p = theta_type_probs_shifted(r, s, t, shifts[0], shifts[1], shifts[2]);
    Rational tv = (rational_abs(p[0] - target[0]) + rational_abs(p[1] - target[1]) +
                   rational_abs(p[2] - target[2])) /
                  2;
    if (tv >= tv_target)
        throw resource_cap_error("theta UST solve did not converge; best TV " +
                                 format_rational(tv) + " at shifts (" + format_rational(shifts[0]) +
                                 ", " + format_rational(shifts[1]) + ", " + format_rational(shifts[2]) + ")");
    return shifts;
}

// True when no subgraph realizes a theta with unequal arm lengths. Searched
// exhaustively: for every vertex pair, enumerate simple connecting paths and
// look for three pairwise internally disjoint ones that are not all equally
// long.
inline bool is_snowman_free(const Graph& g, size_t path_cap = 200000) {
    if (g.n > 12) throw resource_cap_error("snowman search capped at 12 vertices");
    std::vector<std::vector<int>> adj(g.n);
    for (auto [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> deg(g.n);
    for (int v = 0; v < g.n; ++v) deg[v] = static_cast<int>(adj[v].size());

    for (int a = 0; a < g.n; ++a) {
        if (deg[a] < 3) continue;  // a theta pole needs three disjoint exits
        for (int b = a + 1; b < g.n; ++b) {
            if (deg[b] < 3) continue;
            // All simple a-b paths, stored as (interior vertex set, length).
            std::vector<std::pair<std::uint64_t, int>> paths;
            std::vector<bool> visited(g.n, false);
            visited[a] = true;
            std::uint64_t interior = 0;
            std::function<void(int, int)> dfs = [&](int u, int length) {
                if (paths.size() > path_cap)
                    throw resource_cap_error("too many paths in snowman search");
                if (u == b) {
                    paths.emplace_back(interior, length);
                    return;
                }
                for (int w : adj[u]) {
                    if (visited[w]) continue;
                    if (w == b) {
                        paths.emplace_back(interior, length + 1);
                        continue;
                    }
                    visited[w] = true;
                    interior |= std::uint64_t(1) << w;
                    dfs(w, length + 1);
                    interior &= ~(std::uint64_t(1) << w);
                    visited[w] = false;
                }
            };
            dfs(a, 0);
            const size_t np = paths.size();
            for (size_t i = 0; i < np; ++i)
                for (size_t j = i + 1; j < np; ++j) {
                    if (paths[i].first & paths[j].first) continue;
                    for (size_t k = j + 1; k < np; ++k) {
                        if ((paths[i].first | paths[j].first) & paths[k].first) continue;
                        int li = paths[i].second, lj = paths[j].second, lk = paths[k].second;
                        if (!(li == lj && lj == lk)) return false;
                    }
                }
        }
    }
    return true;
}

}  // namespace treeprob
