#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "treeprob/mst_exact.hpp"

namespace treeprob {

namespace detail {

inline std::string ahu_rooted(int v, int parent, const std::vector<std::vector<int>>& adj) {
    std::vector<std::string> kids;
    for (int w : adj[v])
        if (w != parent) kids.push_back(ahu_rooted(w, v, adj));
    std::sort(kids.begin(), kids.end());
    std::string code = "(";
    for (const auto& k : kids) code += k;
    code += ")";
    return code;
}

}  // namespace detail

// Canonical isomorphism code of a forest on n labeled vertices: per-component
// AHU encodings rooted at tree centers, sorted. Isolated vertices encode "()".
inline std::string canonical_forest_code(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = ncomp;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : adj[u])
                if (comp[w] < 0) {
                    comp[w] = ncomp;
                    stack.push_back(w);
                }
        }
        ++ncomp;
    }
    std::vector<std::vector<int>> members(ncomp);
    for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);

    std::vector<std::string> codes;
    for (const auto& verts : members) {
        // Strip leaves to locate the (one or two) centers.
        std::map<int, int> degree;
        for (int v : verts) degree[v] = static_cast<int>(adj[v].size());
        std::set<int> alive(verts.begin(), verts.end());
        while (alive.size() > 2) {
            std::vector<int> leaves;
            for (int v : alive)
                if (degree[v] <= 1) leaves.push_back(v);
            for (int v : leaves) {
                alive.erase(v);
                for (int w : adj[v])
                    if (alive.count(w)) --degree[w];
            }
        }
        std::string best;
        for (int center : alive) {
            std::string c = detail::ahu_rooted(center, -1, adj);
            if (best.empty() || c < best) best = c;
        }
        codes.push_back(best);
    }
    std::sort(codes.begin(), codes.end());
    std::string out;
    for (const auto& c : codes) out += c;
    return out;
}

struct ForestClass {
    std::string code;
    std::vector<std::pair<int, int>> rep_edges;  // one representative embedding in K_n
    int edge_count = 0;
    int boundary = 0;  // #dF = e_2 of the component-size multiset
    Rational prob;                   // P_Kru of any labeled copy
    Rational weighted;               // P~ = prob/#dF, zero for spanning trees
};

// e_2(comp-size(F)) for a forest embedded in K_n.
inline int forest_boundary_kn(int n, const std::vector<std::pair<int, int>>& edges) {
    Dsu dsu(n);
    for (auto [u, v] : edges) dsu.unite(u, v);
    std::map<int, int> size;
    for (int v = 0; v < n; ++v) ++size[dsu.find(v)];
    long total = 0, sq = 0;
    for (auto [root, s] : size) {
        total += s;
        sq += static_cast<long>(s) * s;
    }
    return static_cast<int>((total * total - sq) / 2);
}

// P_Kru for one representative of every forest isomorphism class in K_n,
// computed over unlabeled shapes with the deletion induction
// P(F) = sum_e P~(F \ e). Classes are generated level by level.
inline std::map<std::string, ForestClass> forest_class_probs_kn(int n) {
    if (n < 2 || n > 8) throw std::invalid_argument("forest classes supported for 2 <= n <= 8");
    std::map<std::string, ForestClass> all;

    ForestClass empty;
    empty.code = canonical_forest_code(n, {});
    empty.edge_count = 0;
    empty.boundary = forest_boundary_kn(n, {});
    empty.prob = 1;
    empty.weighted = empty.prob / empty.boundary;
    all[empty.code] = empty;

    std::vector<ForestClass> level{empty};
    for (int k = 1; k <= n - 1; ++k) {
        std::map<std::string, ForestClass> next;
        for (const auto& cls : level) {
            Dsu dsu(n);
            for (auto [u, v] : cls.rep_edges) dsu.unite(u, v);
            for (int u = 0; u < n; ++u) {
                for (int v = u + 1; v < n; ++v) {
                    Dsu probe = dsu;
                    if (!probe.unite(u, v)) continue;
                    auto edges = cls.rep_edges;
                    edges.emplace_back(u, v);
                    std::string code = canonical_forest_code(n, edges);
                    if (next.count(code)) continue;
                    ForestClass fc;
                    fc.code = code;
                    fc.rep_edges = edges;
                    fc.edge_count = k;
                    fc.boundary = forest_boundary_kn(n, edges);
                    fc.prob = 0;
                    for (size_t i = 0; i < edges.size(); ++i) {
                        auto sub = edges;
                        sub.erase(sub.begin() + static_cast<long>(i));
                        fc.prob += all.at(canonical_forest_code(n, sub)).weighted;
                    }
                    fc.weighted = fc.boundary > 0 ? Rational(fc.prob / fc.boundary) : Rational(0);
                    next[code] = fc;
                }
            }
        }
        level.clear();
        for (auto& [code, fc] : next) {
            all[code] = fc;
            level.push_back(fc);
        }
    }
    return all;
}

// Number of labeled copies of the class inside K_n (orbit size under S_n).
inline Integer labeled_copies_kn(int n, const std::vector<std::pair<int, int>>& rep) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::set<std::set<std::pair<int, int>>> images;
    do {
        std::set<std::pair<int, int>> image;
        for (auto [u, v] : rep) {
            int a = perm[u], b = perm[v];
            image.emplace(std::min(a, b), std::max(a, b));
        }
        images.insert(image);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return Integer(static_cast<long>(images.size()));
}

}  // namespace treeprob
