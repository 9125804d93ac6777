#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeprob/rational.hpp"

namespace treeprob {

// Edge subsets are bitmasks over edge indices, which caps graphs at 64 edges.
// That is far beyond the exact-enumeration scale this library targets.
using EdgeMask = std::uint64_t;

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    bool unite(int a, int b) {
        a = find(a); b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

// Simple undirected graph with stable edge indices (index = position in the
// edge list). All downstream objects (permutations, weights, shift vectors)
// align with edges by index.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    Graph() = default;
    Graph(int n_, std::vector<std::pair<int, int>> edges_) : n(n_), edges(std::move(edges_)) {
        validate();
    }

    int m() const { return static_cast<int>(edges.size()); }

    void validate() const {
        if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
        if (edges.size() > 4096) throw std::invalid_argument("graph too large");
        std::set<std::pair<int, int>> seen;
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
            if (u == v) throw std::invalid_argument("self-loop");
            auto key = std::minmax(u, v);
            if (!seen.emplace(key.first, key.second).second) throw std::invalid_argument("duplicate edge");
        }
    }

    int edge_index(int u, int v) const {
        for (int i = 0; i < m(); ++i) {
            auto [a, b] = edges[i];
            if ((a == u && b == v) || (a == v && b == u)) return i;
        }
        return -1;
    }
};

inline Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return Graph(n, std::move(e));
}

inline Graph cycle_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, std::move(e));
}

// theta(r,s,t): two poles joined by internally disjoint paths of the given
// lengths. Edges are listed path by path (all r-edges, then s, then t).
inline Graph theta_graph(int r, int s, int t) {
    if (r < 1 || s < 1 || t < 1) throw std::invalid_argument("theta path lengths must be positive");
    int ones = (r == 1) + (s == 1) + (t == 1);
    if (ones > 1) throw std::invalid_argument("at most one theta path may be a single edge");
    int n = 2 + (r - 1) + (s - 1) + (t - 1);
    std::vector<std::pair<int, int>> e;
    int next = 2;
    auto add_path = [&](int len) {
        int prev = 0;
        for (int i = 1; i < len; ++i) {
            e.emplace_back(prev, next);
            prev = next++;
        }
        e.emplace_back(prev, 1);
    };
    add_path(r);
    add_path(s);
    add_path(t);
    return Graph(n, std::move(e));
}

inline bool mask_contains(EdgeMask mask, int e) { return (mask >> e) & 1u; }

inline std::vector<int> mask_to_edges(EdgeMask mask, int m) {
    std::vector<int> out;
    for (int i = 0; i < m; ++i)
        if (mask_contains(mask, i)) out.push_back(i);
    return out;
}

inline EdgeMask edges_to_mask(const std::vector<int>& edges) {
    EdgeMask mask = 0;
    for (int e : edges) {
        if (e < 0 || e >= 64) throw std::invalid_argument("edge index beyond bitmask range");
        mask |= EdgeMask(1) << e;
    }
    return mask;
}

inline int component_count(const Graph& g, EdgeMask mask) {
    Dsu dsu(g.n);
    int comps = g.n;
    for (int i = 0; i < g.m(); ++i)
        if (mask_contains(mask, i) && dsu.unite(g.edges[i].first, g.edges[i].second)) --comps;
    return comps;
}

inline bool is_connected(const Graph& g, EdgeMask mask) { return component_count(g, mask) == 1; }

inline bool is_connected(const Graph& g) {
    Dsu dsu(g.n);
    int comps = g.n;
    for (auto [u, v] : g.edges)
        if (dsu.unite(u, v)) --comps;
    return comps == 1;
}

inline bool is_acyclic(const Graph& g, EdgeMask mask) {
    Dsu dsu(g.n);
    for (int i = 0; i < g.m(); ++i)
        if (mask_contains(mask, i) && !dsu.unite(g.edges[i].first, g.edges[i].second)) return false;
    return true;
}

inline bool is_spanning_tree(const Graph& g, const std::vector<int>& tree) {
    if (static_cast<int>(tree.size()) != g.n - 1) return false;
    Dsu dsu(g.n);
    for (int e : tree) {
        if (e < 0 || e >= g.m()) return false;
        if (!dsu.unite(g.edges[e].first, g.edges[e].second)) return false;
    }
    return true;
}

// Every spanning tree exactly once, as sorted edge-index lists in
// lexicographic order. Contraction/deletion style backtracking over edge
// indices with a connectivity prune.
inline std::vector<std::vector<int>> enumerate_spanning_trees(const Graph& g) {
    if (!is_connected(g)) throw std::invalid_argument("graph not connected");
    std::vector<std::vector<int>> out;
    std::vector<int> chosen;
    const int need = g.n - 1;

    auto connectable = [&](int next_edge) {
        // All remaining edges plus the chosen ones must still span.
        Dsu dsu(g.n);
        int comps = g.n;
        for (int e : chosen)
            if (dsu.unite(g.edges[e].first, g.edges[e].second)) --comps;
        for (int e = next_edge; e < g.m(); ++e)
            if (dsu.unite(g.edges[e].first, g.edges[e].second)) --comps;
        return comps == 1;
    };

    std::function<void(int, Dsu)> rec = [&](int idx, Dsu dsu) {
        if (static_cast<int>(chosen.size()) == need) {
            out.push_back(chosen);
            return;
        }
        if (idx == g.m()) return;
        if (static_cast<int>(chosen.size()) + (g.m() - idx) < need) return;
        Dsu with = dsu;
        if (with.unite(g.edges[idx].first, g.edges[idx].second)) {
            chosen.push_back(idx);
            rec(idx + 1, with);
            chosen.pop_back();
        }
        if (connectable(idx + 1)) rec(idx + 1, dsu);
    };
    rec(0, Dsu(g.n));
    return out;
}

// Kirchhoff count through fraction-free (Bareiss) elimination of a Laplacian
// cofactor; exact in integers. Disconnected graphs count zero.
inline Integer spanning_tree_count(const Graph& g) {
    if (g.n == 1) return 1;
    const int d = g.n - 1;
    std::vector<std::vector<Integer>> a(d, std::vector<Integer>(d, Integer(0)));
    for (auto [u, v] : g.edges) {
        if (u < d) a[u][u] += 1;
        if (v < d) a[v][v] += 1;
        if (u < d && v < d) {
            a[u][v] -= 1;
            a[v][u] -= 1;
        }
    }
    Integer prev(1);
    int sign = 1;
    for (int k = 0; k < d; ++k) {
        if (a[k][k] == 0) {
            int pivot = -1;
            for (int r = k + 1; r < d; ++r)
                if (a[r][k] != 0) { pivot = r; break; }
            if (pivot < 0) return 0;
            std::swap(a[k], a[pivot]);
            sign = -sign;
        }
        for (int i = k + 1; i < d; ++i)
            for (int j = k + 1; j < d; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    Integer det = a[d - 1][d - 1];
    return sign > 0 ? det : Integer(-det);
}

// Tree path P_{T,e} between the endpoints of a non-tree edge e, as tree edge
// indices in path order. C_e = P_e plus e itself.
inline std::vector<int> broken_cycle(const Graph& g, const std::vector<int>& tree, int e) {
    if (!is_spanning_tree(g, tree)) throw std::invalid_argument("not a spanning tree");
    if (std::find(tree.begin(), tree.end(), e) != tree.end())
        throw std::invalid_argument("edge lies in the tree");
    if (e < 0 || e >= g.m()) throw std::invalid_argument("edge index out of range");

    std::vector<std::vector<std::pair<int, int>>> adj(g.n);  // (neighbor, edge index)
    for (int t : tree) {
        auto [u, v] = g.edges[t];
        adj[u].emplace_back(v, t);
        adj[v].emplace_back(u, t);
    }
    auto [src, dst] = g.edges[e];
    std::vector<int> parent_edge(g.n, -1), parent(g.n, -1);
    std::vector<int> stack{src};
    std::vector<bool> seen(g.n, false);
    seen[src] = true;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (auto [w, idx] : adj[u]) {
            if (seen[w]) continue;
            seen[w] = true;
            parent[w] = u;
            parent_edge[w] = idx;
            stack.push_back(w);
        }
    }
    std::vector<int> path;
    for (int v = dst; v != src; v = parent[v]) path.push_back(parent_edge[v]);
    std::reverse(path.begin(), path.end());
    return path;
}

// All pairs (tree edge, non-tree edge) with the tree edge on the non-edge's
// broken cycle.
inline std::vector<std::pair<int, int>> cycle_relation(const Graph& g, const std::vector<int>& tree) {
    if (!is_spanning_tree(g, tree)) throw std::invalid_argument("not a spanning tree");
    std::vector<char> in_tree(static_cast<size_t>(g.m()), 0);
    for (int t : tree) in_tree[static_cast<size_t>(t)] = 1;
    std::vector<std::pair<int, int>> rel;
    for (int e = 0; e < g.m(); ++e) {
        if (in_tree[static_cast<size_t>(e)]) continue;
        for (int t : broken_cycle(g, tree, e)) rel.emplace_back(t, e);
    }
    std::sort(rel.begin(), rel.end());
    return rel;
}

// Greedy Kruskal selection from a full edge order (position = rank).
inline std::vector<int> kruskal_select(const Graph& g, const std::vector<int>& order) {
    if (!is_connected(g)) throw std::invalid_argument("graph not connected");
    if (static_cast<int>(order.size()) != g.m()) throw std::invalid_argument("order must rank every edge");
    Dsu dsu(g.n);
    std::vector<int> tree;
    for (int e : order) {
        if (dsu.unite(g.edges[e].first, g.edges[e].second)) tree.push_back(e);
        if (static_cast<int>(tree.size()) == g.n - 1) break;
    }
    std::sort(tree.begin(), tree.end());
    return tree;
}

}  // namespace treeprob
