#pragma once

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_map>
#include <vector>

#include "treeprob/errors.hpp"
#include "treeprob/graph.hpp"
#include "treeprob/rational.hpp"

namespace treeprob {

// Exact distribution on spanning trees, keyed by canonical (sorted) edge lists.
using TreeDistribution = std::map<std::vector<int>, Rational>;

// Number of edges of g joining distinct components of the spanning subgraph
// given by mask.
inline int boundary_size(const Graph& g, EdgeMask mask) {
    Dsu dsu(g.n);
    for (int i = 0; i < g.m(); ++i)
        if (mask_contains(mask, i)) dsu.unite(g.edges[i].first, g.edges[i].second);
    int count = 0;
    for (int i = 0; i < g.m(); ++i) {
        if (mask_contains(mask, i)) continue;
        if (dsu.find(g.edges[i].first) != dsu.find(g.edges[i].second)) ++count;
    }
    return count;
}

// Number of non-separating edges of the subgraph (edges lying on a cycle).
inline int interior_size(const Graph& g, EdgeMask mask) {
    int count = 0;
    for (int i = 0; i < g.m(); ++i) {
        if (!mask_contains(mask, i)) continue;
        EdgeMask without = mask & ~(EdgeMask(1) << i);
        Dsu dsu(g.n);
        for (int j = 0; j < g.m(); ++j)
            if (mask_contains(without, j)) dsu.unite(g.edges[j].first, g.edges[j].second);
        if (dsu.find(g.edges[i].first) == dsu.find(g.edges[i].second)) ++count;
    }
    return count;
}

inline bool is_biconnected_spanning(const Graph& g, EdgeMask mask) {
    if (!is_connected(g, mask)) return false;
    if (g.n <= 2) return true;
    // No cut vertex: deleting any vertex leaves the rest connected.
    for (int cut = 0; cut < g.n; ++cut) {
        Dsu dsu(g.n);
        int comps = g.n - 1;
        for (int i = 0; i < g.m(); ++i) {
            if (!mask_contains(mask, i)) continue;
            auto [u, v] = g.edges[i];
            if (u == cut || v == cut) continue;
            if (dsu.unite(u, v)) --comps;
        }
        if (comps != 1) return false;
    }
    return true;
}

// Memoizing exact-probability engine for ordinary MST on a fixed graph.
// All four routes of computing P_MST(T) live here: the Kruskal induction,
// the reverse-delete induction, the external (broken-cycle) formula, and a
// brute-force order enumeration used as an oracle.
class MstExact {
public:
    explicit MstExact(Graph g) : g_(std::move(g)) {
        if (g_.m() > 64) throw resource_cap_error("exact engine capped at 64 edges");
        full_mask_ = g_.m() == 64 ? ~EdgeMask(0) : (EdgeMask(1) << g_.m()) - 1;
    }

    const Graph& graph() const { return g_; }

    // P_Kru(F): probability that Kruskal's process passes through forest F.
    Rational kruskal_forest_prob(const std::vector<int>& forest) {
        EdgeMask mask = edges_to_mask(forest);
        if (!is_acyclic(g_, mask)) throw std::invalid_argument("forest has a cycle");
        if (!is_connected(g_)) throw std::invalid_argument("graph not connected");
        return kru_prob(mask);
    }

    // Weighted variant P~(F) = P_Kru(F)/|dF| for forests that are not spanning.
    Rational weighted_forest_prob(const std::vector<int>& forest) {
        EdgeMask mask = edges_to_mask(forest);
        if (!is_acyclic(g_, mask)) throw std::invalid_argument("forest has a cycle");
        int b = boundary_size(g_, mask);
        if (b == 0) throw std::invalid_argument("weighted probability undefined for spanning trees");
        return kru_prob(mask) / b;
    }

    // P_RD(H): probability that reverse-delete passes through the connected
    // spanning subgraph H.
    Rational reverse_delete_prob(const std::vector<int>& subgraph) {
        EdgeMask mask = edges_to_mask(subgraph);
        if (!is_connected(g_, mask)) throw std::invalid_argument("subgraph disconnected");
        return rd_prob(mask);
    }

    Rational mst_prob_internal(const std::vector<int>& tree) {
        if (!is_spanning_tree(g_, tree)) throw std::invalid_argument("not a spanning tree");
        return kru_prob(edges_to_mask(tree));
    }

    // External formula: sum over orders of the non-edges of 1/|D_j| products,
    // where D_j is the running union of broken cycles. Shared-prefix sums are
    // memoized on the set of placed non-edges.
    Rational mst_prob_external(const std::vector<int>& tree, unsigned long perm_cap = 3628800UL) {
        if (!is_spanning_tree(g_, tree)) throw std::invalid_argument("not a spanning tree");
        EdgeMask tmask = edges_to_mask(tree);
        std::vector<int> non_edges;
        for (int e = 0; e < g_.m(); ++e)
            if (!mask_contains(tmask, e)) non_edges.push_back(e);
        const int k = static_cast<int>(non_edges.size());
        Integer perms = factorial(static_cast<unsigned>(k));
        if (perms > perm_cap)
            throw resource_cap_error("too many non-edges: " + perms.get_str() +
                                     " orders exceed cap " + std::to_string(perm_cap));
        std::vector<EdgeMask> cycle_mask(k);
        for (int i = 0; i < k; ++i) {
            EdgeMask c = EdgeMask(1) << non_edges[i];
            for (int t : broken_cycle(g_, tree, non_edges[i])) c |= EdgeMask(1) << t;
            cycle_mask[i] = c;
        }
        std::unordered_map<std::uint64_t, Rational> memo;
        std::function<Rational(std::uint64_t, EdgeMask)> rec =
            [&](std::uint64_t used, EdgeMask d) -> Rational {
            if (used == (std::uint64_t(1) << k) - 1) return 1;
            auto it = memo.find(used);
            if (it != memo.end()) return it->second;
            Rational sum = 0;
            for (int i = 0; i < k; ++i) {
                if ((used >> i) & 1u) continue;
                EdgeMask d2 = d | cycle_mask[i];
                sum += rec(used | (std::uint64_t(1) << i), d2) / std::popcount(d2);
            }
            memo.emplace(used, sum);
            return sum;
        };
        return rec(0, 0);
    }

    Rational brute_force_mst_prob(const std::vector<int>& tree, int edge_cap = 10) {
        if (!is_spanning_tree(g_, tree)) throw std::invalid_argument("not a spanning tree");
        TreeDistribution dist = brute_force_distribution(edge_cap);
        auto key = tree;
        std::sort(key.begin(), key.end());
        auto it = dist.find(key);
        return it == dist.end() ? Rational(0) : it->second;
    }

    // Tallies Kruskal output over all m! edge orders.
    TreeDistribution brute_force_distribution(int edge_cap = 10) {
        if (g_.m() > edge_cap)
            throw resource_cap_error("brute force capped at " + std::to_string(edge_cap) + " edges");
        if (!is_connected(g_)) throw std::invalid_argument("graph not connected");
        if (!brute_memo_.empty()) return brute_memo_;
        std::vector<int> order(g_.m());
        std::iota(order.begin(), order.end(), 0);
        std::map<std::vector<int>, Integer> counts;
        do {
            counts[kruskal_select(g_, order)] += 1;
        } while (std::next_permutation(order.begin(), order.end()));
        Integer total = factorial(static_cast<unsigned>(g_.m()));
        for (auto& [tree, c] : counts) brute_memo_[tree] = rat(c, total);
        return brute_memo_;
    }

    TreeDistribution mst_distribution(long tree_cap = 20000) {
        if (!is_connected(g_)) throw std::invalid_argument("graph not connected");
        Integer count = spanning_tree_count(g_);
        if (count > tree_cap)
            throw resource_cap_error("tree count " + count.get_str() + " exceeds cap " +
                                     std::to_string(tree_cap) + "; raise --max-trees");
        TreeDistribution dist;
        for (const auto& tree : enumerate_spanning_trees(g_)) dist[tree] = kru_prob(edges_to_mask(tree));
        return dist;
    }

private:
    Rational kru_prob(EdgeMask forest) {
        if (forest == 0) return 1;
        auto it = kru_memo_.find(forest);
        if (it != kru_memo_.end()) return it->second;
        Rational sum = 0;
        for (int e = 0; e < g_.m(); ++e) {
            if (!mask_contains(forest, e)) continue;
            EdgeMask smaller = forest & ~(EdgeMask(1) << e);
            sum += kru_prob(smaller) / boundary_size(g_, smaller);
        }
        kru_memo_.emplace(forest, sum);
        return sum;
    }

    Rational rd_prob(EdgeMask sub) {
        if (sub == full_mask_) return 1;
        auto it = rd_memo_.find(sub);
        if (it != rd_memo_.end()) return it->second;
        Rational sum = 0;
        for (int e = 0; e < g_.m(); ++e) {
            if (mask_contains(sub, e)) continue;
            EdgeMask larger = sub | (EdgeMask(1) << e);
            sum += rd_prob(larger) / interior_size(g_, larger);
        }
        rd_memo_.emplace(sub, sum);
        return sum;
    }

    Graph g_;
    EdgeMask full_mask_ = 0;
    std::unordered_map<EdgeMask, Rational> kru_memo_;
    std::unordered_map<EdgeMask, Rational> rd_memo_;
    TreeDistribution brute_memo_;
};

// P_MST of any labeled star spanning K_n: 1/(2n-3)!!.
inline Rational star_prob_closed_form(int n) {
    if (n < 2) throw std::invalid_argument("star needs at least 2 vertices");
    return rat(Integer(1), double_factorial(static_cast<unsigned>(2 * n - 3)));
}

}  // namespace treeprob
