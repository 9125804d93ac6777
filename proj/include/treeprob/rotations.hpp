#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <set>

#include "treeprob/mst_exact.hpp"
#include "treeprob/rng.hpp"

namespace treeprob {

enum class Expansion { NotExpanding, Weak, Strict };

// Product of all vertex degrees of a tree (or any edge set) on n vertices.
inline Integer degree_product(int n, const Graph& g, const std::vector<int>& tree) {
    std::vector<int> deg(n, 0);
    for (int e : tree) {
        ++deg[g.edges[e].first];
        ++deg[g.edges[e].second];
    }
    Integer prod(1);
    for (int v = 0; v < n; ++v) prod *= std::max(deg[v], 1);
    return prod;
}

// Classifies a candidate bijection beta (edge index -> edge index) as
// cycle-expanding from t1 to t2: Strict when beta(R1) is properly contained
// in R2, Weak on equality, NotExpanding otherwise.
inline Expansion cycle_expanding_check(const Graph& g, const std::vector<int>& t1,
                                       const std::vector<int>& t2, const std::vector<int>& beta) {
    if (static_cast<int>(beta.size()) != g.m()) throw std::invalid_argument("bijection size mismatch");
    std::vector<bool> hit(g.m(), false);
    for (int v : beta) {
        if (v < 0 || v >= g.m() || hit[v]) throw std::invalid_argument("not a bijection");
        hit[v] = true;
    }
    std::set<int> image;
    for (int e : t1) image.insert(beta[e]);
    if (image != std::set<int>(t2.begin(), t2.end()))
        throw std::invalid_argument("bijection does not map t1 onto t2");

    auto r1 = cycle_relation(g, t1);
    auto r2 = cycle_relation(g, t2);
    std::set<std::pair<int, int>> r2set(r2.begin(), r2.end());
    std::set<std::pair<int, int>> mapped;
    for (auto [e, f] : r1) mapped.emplace(beta[e], beta[f]);
    for (auto& p : mapped)
        if (!r2set.count(p)) return Expansion::NotExpanding;
    return mapped.size() < r2set.size() ? Expansion::Strict : Expansion::Weak;
}

// Complete search for a cycle-expanding bijection from t1 to t2, or nullopt.
// Non-edges may only map to non-edges with broken cycles at least as long
// (necessary for expansion), which prunes hard; tree edges are then matched
// against the intersections of target paths.
inline std::optional<std::vector<int>> find_cycle_expanding_bijection(const Graph& g,
                                                                      const std::vector<int>& t1,
                                                                      const std::vector<int>& t2) {
    if (!is_spanning_tree(g, t1) || !is_spanning_tree(g, t2))
        throw std::invalid_argument("not spanning trees");
    EdgeMask m1 = edges_to_mask(t1), m2 = edges_to_mask(t2);
    std::vector<int> non1, non2;
    for (int e = 0; e < g.m(); ++e) {
        if (!mask_contains(m1, e)) non1.push_back(e);
        if (!mask_contains(m2, e)) non2.push_back(e);
    }
    const int k = static_cast<int>(non1.size());
    const int nt = static_cast<int>(t1.size());
    std::vector<EdgeMask> path1(k), path2(k);
    std::vector<int> len1(k), len2(k);
    for (int i = 0; i < k; ++i) {
        auto p1 = broken_cycle(g, t1, non1[i]);
        auto p2 = broken_cycle(g, t2, non2[i]);
        path1[i] = edges_to_mask(p1);
        path2[i] = edges_to_mask(p2);
        len1[i] = static_cast<int>(p1.size());
        len2[i] = static_cast<int>(p2.size());
    }
    // Process the most constrained (longest-cycle) sources first.
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return len1[a] > len1[b]; });

    std::vector<int> assign(k, -1);       // non1 slot -> non2 slot
    std::vector<bool> used(k, false);
    // allowed[tree edge slot of t1] = mask over t2 edge slots.
    std::vector<EdgeMask> allowed(nt, (nt == 64 ? ~EdgeMask(0) : (EdgeMask(1) << nt) - 1));

    auto tree_match = [&](auto&& self, std::vector<EdgeMask>& avail, std::vector<int>& match,
                          int slot) -> bool {
        if (slot == nt) return true;
        for (int j = 0; j < nt; ++j) {
            if (!mask_contains(avail[slot], j)) continue;
            bool taken = false;
            for (int s = 0; s < slot; ++s)
                if (match[s] == j) taken = true;
            if (taken) continue;
            match[slot] = j;
            if (self(self, avail, match, slot + 1)) return true;
            match[slot] = -1;
        }
        return false;
    };

    auto feasible = [&](std::vector<int>* out_match) {
        // Build per-tree-edge allowed sets from the current partial assignment.
        std::vector<EdgeMask> avail(nt);
        for (int s = 0; s < nt; ++s) {
            EdgeMask mask = (nt == 64 ? ~EdgeMask(0) : (EdgeMask(1) << nt) - 1);
            for (int i = 0; i < k; ++i) {
                if (assign[i] < 0) continue;
                if (!mask_contains(path1[i], t1[s])) continue;
                EdgeMask target = 0;
                for (int j = 0; j < nt; ++j)
                    if (mask_contains(path2[assign[i]], t2[j])) target |= EdgeMask(1) << j;
                mask &= target;
            }
            if (mask == 0) return false;
            avail[s] = mask;
        }
        std::vector<int> match(nt, -1);
        if (!tree_match(tree_match, avail, match, 0)) return false;
        if (out_match) *out_match = match;
        return true;
    };

    std::function<bool(int)> rec = [&](int idx) -> bool {
        if (idx == k) return feasible(nullptr);
        int i = order[idx];
        for (int j = 0; j < k; ++j) {
            if (used[j] || len2[j] < len1[i]) continue;
            assign[i] = j;
            used[j] = true;
            if (feasible(nullptr) && rec(idx + 1)) return true;
            used[j] = false;
            assign[i] = -1;
        }
        return false;
    };
    if (!rec(0)) return std::nullopt;

    std::vector<int> match;
    if (!feasible(&match)) return std::nullopt;
    std::vector<int> beta(g.m(), -1);
    for (int s = 0; s < nt; ++s) beta[t1[s]] = t2[match[s]];
    for (int i = 0; i < k; ++i) beta[non1[i]] = non2[assign[i]];
    if (cycle_expanding_check(g, t1, t2, beta) == Expansion::NotExpanding) return std::nullopt;
    return beta;
}

struct RotationSite {
    std::vector<int> tree_more_likely;   // S
    std::vector<int> tree_less_likely;   // S'
    std::array<int, 3> triangle;         // (v1, v2, v3) in the roles of the rotation
};

// All triangle-edge rotation sites of g: triangles with disjoint trees
// T1, T2, T3 such that some extra edge joins T1 and T2 while e13 is the only
// edge between T1 and T3. Each site yields spanning trees S, S' with
// P_MST(S) > P_MST(S').
inline std::vector<RotationSite> triangle_rotation_sites(const Graph& g) {
    std::vector<RotationSite> sites;
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
    if (!is_connected(g)) return sites;
    std::vector<std::vector<bool>> adj(g.n, std::vector<bool>(g.n, false));
    for (auto [u, v] : g.edges) adj[u][v] = adj[v][u] = true;

    std::vector<int> rest;
    auto span_part = [&](const std::vector<int>& verts) -> std::optional<std::vector<int>> {
        // Spanning tree of the induced subgraph, as edge indices; nullopt if
        // the part is not connected.
        if (verts.size() == 1) return std::vector<int>{};
        std::vector<bool> in(g.n, false);
        for (int v : verts) in[v] = true;
        Dsu dsu(g.n);
        std::vector<int> tree;
        for (int e = 0; e < g.m(); ++e) {
            auto [u, v] = g.edges[e];
            if (in[u] && in[v] && dsu.unite(u, v)) tree.push_back(e);
        }
        if (static_cast<int>(tree.size()) != static_cast<int>(verts.size()) - 1) return std::nullopt;
        return tree;
    };

    std::vector<std::array<int, 3>> triangles;
    for (int a = 0; a < g.n; ++a)
        for (int b = a + 1; b < g.n; ++b)
            for (int c = b + 1; c < g.n; ++c)
                if (adj[a][b] && adj[b][c] && adj[a][c]) triangles.push_back({a, b, c});

    for (auto tri : triangles) {
        std::vector<int> others;
        for (int v = 0; v < g.n; ++v)
            if (v != tri[0] && v != tri[1] && v != tri[2]) others.push_back(v);
        std::array<int, 3> roles;
        std::sort(tri.begin(), tri.end());
        std::vector<std::array<int, 3>> perms;
        std::array<int, 3> p = tri;
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));

        const long parts = static_cast<long>(std::pow(3.0, static_cast<double>(others.size())) + 0.5);
        for (auto role : perms) {
            roles = role;
            for (long codeword = 0; codeword < parts; ++codeword) {
                std::array<std::vector<int>, 3> verts{{{roles[0]}, {roles[1]}, {roles[2]}}};
                long c = codeword;
                for (int v : others) {
                    verts[c % 3].push_back(v);
                    c /= 3;
                }
                auto t1 = span_part(verts[0]);
                auto t2 = span_part(verts[1]);
                auto t3 = span_part(verts[2]);
                if (!t1 || !t2 || !t3) continue;
                // Edge counts between the parts.
                int between12 = 0, between13 = 0;
                std::vector<int> part(g.n, -1);
                for (int i = 0; i < 3; ++i)
                    for (int v : verts[i]) part[v] = i;
                for (auto [u, v] : g.edges) {
                    int pu = part[u], pv = part[v];
                    if (pu > pv) std::swap(pu, pv);
                    if (pu == 0 && pv == 1) ++between12;
                    if (pu == 0 && pv == 2) ++between13;
                }
                if (between12 < 2 || between13 != 1) continue;
                int e12 = g.edge_index(roles[0], roles[1]);
                int e23 = g.edge_index(roles[1], roles[2]);
                int e13 = g.edge_index(roles[0], roles[2]);
                std::vector<int> s = *t1, sp;
                s.insert(s.end(), t2->begin(), t2->end());
                s.insert(s.end(), t3->begin(), t3->end());
                sp = s;
                s.push_back(e12);
                s.push_back(e23);
                sp.push_back(e13);
                sp.push_back(e23);
                std::sort(s.begin(), s.end());
                std::sort(sp.begin(), sp.end());
                if (!is_spanning_tree(g, s) || !is_spanning_tree(g, sp)) continue;
                if (seen.emplace(s, sp).second) sites.push_back({s, sp, roles});
            }
        }
    }
    return sites;
}

inline Graph gnp_graph(int n, double p, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_double() < p) edges.emplace_back(u, v);
    return Graph(n, std::move(edges));
}

struct Witness {
    Graph g;
    std::vector<int> tree_more_likely;
    std::vector<int> tree_less_likely;
    Rational p_more;
    Rational p_less;
};

// Hunts a given graph for the triangle configuration that certifies
// MST0 != UST: a triangle whose removal leaves a connected complement, with
// two triangle vertices wired to the complement. The returned trees are
// verified exactly (P_MST computed by the Kruskal induction).
inline std::optional<Witness> find_mst_ust_witness(const Graph& g) {
    const int n = g.n;
    if (n > 9) throw std::invalid_argument("exact verification capped at n = 9");
    if (!is_connected(g)) return std::nullopt;
    std::vector<std::vector<bool>> adj(g.n, std::vector<bool>(g.n, false));
    for (auto [u, v] : g.edges) adj[u][v] = adj[v][u] = true;

    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                if (x == y || y == z || x == z) continue;
                if (!(adj[x][y] && adj[y][z] && adj[x][z])) continue;
                // Roles: T1 = {x}, T3 = {z}; T2 spans the complement plus y.
                std::vector<int> comp;
                for (int v = 0; v < n; ++v)
                    if (v != x && v != y && v != z) comp.push_back(v);
                if (comp.empty()) continue;
                std::vector<bool> in(n, false);
                for (int v : comp) in[v] = true;
                Dsu dsu(n);
                std::vector<int> comp_tree;
                for (int e = 0; e < g.m(); ++e) {
                    auto [u, v] = g.edges[e];
                    if (in[u] && in[v] && dsu.unite(u, v)) comp_tree.push_back(e);
                }
                if (static_cast<int>(comp_tree.size()) != static_cast<int>(comp.size()) - 1) continue;
                int a_out = -1, b_out = -1;
                for (int v : comp) {
                    if (a_out < 0 && adj[x][v]) a_out = v;
                    if (b_out < 0 && adj[y][v]) b_out = v;
                }
                if (a_out < 0 || b_out < 0) continue;  // x and y must reach the complement
                std::vector<int> t2 = comp_tree;
                t2.push_back(g.edge_index(y, b_out));
                std::vector<int> s = t2, sp = t2;
                s.push_back(g.edge_index(x, y));
                s.push_back(g.edge_index(y, z));
                sp.push_back(g.edge_index(x, z));
                sp.push_back(g.edge_index(y, z));
                std::sort(s.begin(), s.end());
                std::sort(sp.begin(), sp.end());
                if (!is_spanning_tree(g, s) || !is_spanning_tree(g, sp)) continue;
                MstExact engine(g);
                Rational ps = engine.mst_prob_internal(s);
                Rational psp = engine.mst_prob_internal(sp);
                if (!(ps > psp)) continue;  // exact verification
                return Witness{g, s, sp, ps, psp};
            }

    // The proof's configuration is absent: fall back to general triangle
    // rotation sites, then to a direct exact-distribution comparison (any two
    // trees with unequal P_MST certify MST0 != UST just as well). Exactly
    // uniform graphs (trees, cycles, balanced thetas) yield no witness.
    for (const auto& site : triangle_rotation_sites(g)) {
        MstExact engine(g);
        Rational ps = engine.mst_prob_internal(site.tree_more_likely);
        Rational psp = engine.mst_prob_internal(site.tree_less_likely);
        if (ps > psp) return Witness{g, site.tree_more_likely, site.tree_less_likely, ps, psp};
    }
    try {
        MstExact engine(g);
        auto dist = engine.mst_distribution();
        auto lo = dist.begin(), hi = dist.begin();
        for (auto it = dist.begin(); it != dist.end(); ++it) {
            if (it->second < lo->second) lo = it;
            if (it->second > hi->second) hi = it;
        }
        if (hi->second > lo->second) return Witness{g, hi->first, lo->first, hi->second, lo->second};
    } catch (const resource_cap_error&) {
        // Too many trees to enumerate; report no witness rather than guess.
    }
    return std::nullopt;
}

// Samples G(n,p) with the given seed, resampling from the same stream until
// the graph is connected (spanning-tree distributions need a connected
// ambient graph), then searches it for a witness.
inline std::optional<Witness> random_graph_witness(int n, double p, std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.next_double() < p) edges.emplace_back(u, v);
        Graph g(n, std::move(edges));
        if (is_connected(g)) return find_mst_ust_witness(g);
    }
    return std::nullopt;
}

}  // namespace treeprob
