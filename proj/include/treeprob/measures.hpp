#pragma once

#include <map>
#include <optional>
#include <set>

#include "treeprob/errors.hpp"
#include "treeprob/mst_exact.hpp"
#include "treeprob/piecewise.hpp"

namespace treeprob {

struct Atom {
    Rational loc;
    Rational mass;
};

struct UniformPiece {
    Rational lo, hi;
    Rational mass;
};

// Finite product-measure component for one edge: point masses plus uniform
// pieces, total mass one.
struct EdgeMeasure {
    std::vector<Atom> atoms;
    std::vector<UniformPiece> uniforms;

    Rational total_mass() const {
        Rational t = 0;
        for (const auto& a : atoms) t += a.mass;
        for (const auto& u : uniforms) t += u.mass;
        return t;
    }
};

struct ProductMeasureSpec {
    std::vector<EdgeMeasure> vars;

    int size() const { return static_cast<int>(vars.size()); }

    // Non-colliding validation: masses normalize, intervals are proper, and
    // no two distinct variables share an atom location. An atom sitting at
    // another variable's interval endpoint is fine (measure zero).
    void validate() const {
        if (vars.empty()) throw std::invalid_argument("empty measure spec");
        for (const auto& v : vars) {
            if (v.atoms.empty() && v.uniforms.empty())
                throw std::invalid_argument("variable with no mass");
            for (const auto& a : v.atoms)
                if (a.mass < 0) throw std::invalid_argument("negative atom mass");
            for (const auto& u : v.uniforms) {
                if (u.mass < 0) throw std::invalid_argument("negative interval mass");
                if (!(u.lo < u.hi)) throw std::invalid_argument("interval needs lo < hi");
            }
            if (v.total_mass() != 1) throw std::invalid_argument("masses must sum to 1 per variable");
        }
        for (size_t i = 0; i < vars.size(); ++i)
            for (size_t j = i + 1; j < vars.size(); ++j)
                for (const auto& a : vars[i].atoms)
                    for (const auto& b : vars[j].atoms)
                        if (a.loc == b.loc && a.mass > 0 && b.mass > 0)
                            throw std::invalid_argument("collision: shared atom at " + format_rational(a.loc));
    }

    std::vector<Rational> breakpoints() const {
        std::vector<Rational> g;
        for (const auto& v : vars) {
            for (const auto& a : v.atoms) g.push_back(a.loc);
            for (const auto& u : v.uniforms) {
                g.push_back(u.lo);
                g.push_back(u.hi);
            }
        }
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        return g;
    }
};

// Every edge weight uniform on [s_i, s_i + 1].
inline ProductMeasureSpec shift_measure(const std::vector<Rational>& shifts) {
    ProductMeasureSpec spec;
    for (const auto& s : shifts) {
        EdgeMeasure m;
        m.uniforms.push_back({s, s + 1, Rational(1)});
        spec.vars.push_back(m);
    }
    return spec;
}

namespace detail {

// One step of the iterated integration: given g(t) = P(prefix chain, last
// value <= t), returns P(prefix chain, X <= t) for the next variable X.
inline PiecewisePoly integrate_step(const PiecewisePoly& g, const EdgeMeasure& var) {
    PiecewisePoly out(g.grid);
    const size_t K = g.grid.size();
    for (const auto& a : var.atoms) {
        if (a.mass == 0) continue;
        Rational val = g.eval(a.loc) * a.mass;
        if (val == 0) continue;
        size_t start = out.piece_index(a.loc);  // a.loc is on the grid
        for (size_t i = start; i < K; ++i) {
            if (out.pieces[i].empty()) out.pieces[i] = Poly{Rational(0)};
            out.pieces[i][0] += val;
        }
    }
    for (const auto& u : var.uniforms) {
        if (u.mass == 0) continue;
        Rational density = u.mass / (u.hi - u.lo);
        Rational running = 0;
        size_t lo_idx = out.piece_index(u.lo);
        size_t hi_idx = out.piece_index(u.hi);
        for (size_t i = lo_idx; i < hi_idx; ++i) {
            // Piece on [grid[i], grid[i+1]) inside the interval.
            Poly cum = poly_antiderivative(poly_scale(g.pieces[i], density));
            Rational at_left = poly_eval(cum, g.grid[i]);
            Poly piece = cum;
            piece[0] += running - at_left;
            poly_add_inplace(out.pieces[i], piece);
            running += poly_eval(cum, g.grid[i + 1]) - at_left;
        }
        if (running != 0)
            for (size_t i = hi_idx; i < K; ++i) {
                if (out.pieces[i].empty()) out.pieces[i] = Poly{Rational(0)};
                out.pieces[i][0] += running;
            }
    }
    return out;
}

inline PiecewisePoly unit_function(const std::vector<Rational>& grid) {
    PiecewisePoly one(grid);
    for (auto& p : one.pieces) p = Poly{Rational(1)};
    return one;
}

}  // namespace detail

// P(X_{sigma[0]} < X_{sigma[1]} < ... < X_{sigma[m-1]}) for a non-colliding
// finite product measure, by iterated exact integration of piecewise
// polynomials over the merged breakpoint grid.
inline Rational perm_prob_exact(const ProductMeasureSpec& spec, const std::vector<int>& sigma) {
    spec.validate();
    const int m = spec.size();
    if (m > 8) throw resource_cap_error("exact order probabilities capped at 8 variables");
    if (static_cast<int>(sigma.size()) != m) throw std::invalid_argument("order must rank every variable");
    auto grid = spec.breakpoints();
    PiecewisePoly g = detail::unit_function(grid);
    for (int v : sigma) {
        if (v < 0 || v >= m) throw std::invalid_argument("bad variable index");
        g = detail::integrate_step(g, spec.vars[v]);
    }
    return g.total();
}

// All order probabilities at once, sharing prefix integrals across the
// permutation tree and pruning branches whose prefix is already impossible.
inline std::map<std::vector<int>, Rational> order_distribution_exact(const ProductMeasureSpec& spec) {
    spec.validate();
    const int m = spec.size();
    if (m > 8) throw resource_cap_error("exact order probabilities capped at 8 variables");
    auto grid = spec.breakpoints();
    std::map<std::vector<int>, Rational> out;
    std::vector<int> prefix;
    std::vector<bool> used(m, false);

    std::function<void(const PiecewisePoly&)> rec = [&](const PiecewisePoly& g) {
        if (static_cast<int>(prefix.size()) == m) {
            out[prefix] = g.total();
            return;
        }
        for (int v = 0; v < m; ++v) {
            if (used[v]) continue;
            PiecewisePoly next = detail::integrate_step(g, spec.vars[v]);
            if (next.is_zero()) continue;  // this prefix can never happen
            used[v] = true;
            prefix.push_back(v);
            rec(next);
            prefix.pop_back();
            used[v] = false;
        }
    };
    rec(detail::unit_function(grid));
    return out;
}

// Exact spanning-tree distribution induced by a product measure on the edges
// of g: sum of order probabilities grouped by the Kruskal selection.
inline TreeDistribution tree_distribution_exact(const Graph& g, const ProductMeasureSpec& spec) {
    if (spec.size() != g.m()) throw std::invalid_argument("measure count != edge count");
    if (!is_connected(g)) throw std::invalid_argument("graph not connected");
    TreeDistribution dist;
    for (const auto& [order, p] : order_distribution_exact(spec)) {
        if (p == 0) continue;
        dist[kruskal_select(g, order)] += p;
    }
    return dist;
}

inline Rational total_variation(const TreeDistribution& a, const TreeDistribution& b) {
    Rational tv = 0;
    std::set<std::vector<int>> keys;
    for (const auto& [k, v] : a) keys.insert(k);
    for (const auto& [k, v] : b) keys.insert(k);
    for (const auto& k : keys) {
        Rational pa = a.count(k) ? a.at(k) : Rational(0);
        Rational pb = b.count(k) ? b.at(k) : Rational(0);
        tv += rational_abs(pa - pb);
    }
    return tv / 2;
}

inline TreeDistribution uniform_tree_distribution(const Graph& g) {
    auto trees = enumerate_spanning_trees(g);
    TreeDistribution dist;
    Rational p = rat(1, static_cast<long>(trees.size()));
    for (auto& t : trees) dist[t] = p;
    return dist;
}

}  // namespace treeprob
