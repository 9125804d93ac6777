#pragma once

#include <array>
#include <optional>

#include "treeprob/errors.hpp"
#include "treeprob/graph.hpp"
#include "treeprob/rational.hpp"

namespace treeprob {

// A path rotation in K_n: trees L and R hang off a path P = v_1..v_l. In the
// more likely tree T both L and R attach at v_1 (v_l is a leaf); the rotated
// tree T' keeps L at v_1 but attaches R at v_l. Inputs give R in its T'
// position (touching v_l); T is derived by re-targeting v_l to v_1.
struct PathRotationInstance {
    int n = 0;
    std::vector<int> path;                           // v_1..v_l
    std::vector<std::pair<int, int>> left_edges;     // tree on V_L + {v_1}
    std::vector<std::pair<int, int>> right_edges;    // tree on V_R + {v_l}

    int len() const { return static_cast<int>(path.size()); }

    std::vector<std::pair<int, int>> tree_tprime_pairs() const {
        auto out = left_edges;
        for (int i = 0; i + 1 < len(); ++i) out.emplace_back(path[i], path[i + 1]);
        out.insert(out.end(), right_edges.begin(), right_edges.end());
        return out;
    }

    std::vector<std::pair<int, int>> tree_t_pairs() const {
        auto out = left_edges;
        for (int i = 0; i + 1 < len(); ++i) out.emplace_back(path[i], path[i + 1]);
        for (auto [u, v] : right_edges) {
            if (u == path.back()) u = path.front();
            if (v == path.back()) v = path.front();
            out.emplace_back(u, v);
        }
        return out;
    }
};

// Runs the folded-permutation computation for a path rotation pair (T, T').
// The probability of each tree is (2^a/m!) * sum over folded permutations of
// the per-permutation survival probabilities (q, q'), which stay dyadic
// throughout, so they are tracked as a shared exponent plus two alive flags.
class PathRotationEngine {
public:
    enum class PairState : std::uint8_t { Neither, Both, Left, Right, Set };

    explicit PathRotationEngine(PathRotationInstance inst) : inst_(std::move(inst)) {
        build();
    }

    const Graph& ambient() const { return g_; }
    int num_classes() const { return static_cast<int>(class_members_.size()); }
    int folded_r() const { return r_; }
    int pair_class_count() const { return a_; }          // a = (C(l,2) - r)/2
    std::vector<int> tree_t() const { return tree_t_; }
    std::vector<int> tree_tprime() const { return tree_tp_; }

    int class_of_edge(int u, int v) const {
        int e = g_.edge_index(u, v);
        if (e < 0) throw std::invalid_argument("no such edge");
        return cls_of_[e];
    }

    void reset() {
        std::fill(state_.begin(), state_.end(), PairState::Neither);
        std::fill(block_.begin(), block_.end(), 0);
        std::fill(seen_.begin(), seen_.end(), 0);
        exp_ = 0;
        alive_q_ = alive_qp_ = true;
    }

    bool dead() const { return !alive_q_ && !alive_qp_; }
    Rational q() const { return alive_q_ ? dyadic(exp_) : Rational(0); }
    Rational qprime() const { return alive_qp_ ? dyadic(exp_) : Rational(0); }

    // Fixture injection: pair states are 1-indexed (index i describes the
    // pair {e_i, reflected e_i}).
    void set_state(const std::vector<PairState>& st, const std::vector<std::vector<int>>& blocks,
                   int exponent) {
        if (static_cast<int>(st.size()) != r_) throw std::invalid_argument("state size != r");
        for (int i = 1; i <= r_; ++i) state_[i] = st[i - 1];
        std::fill(block_.begin(), block_.end(), 0);
        for (const auto& b : blocks) {
            int id = *std::min_element(b.begin(), b.end());
            for (int i : b) {
                if (state_[i] != PairState::Set) throw std::invalid_argument("block member not a set");
                block_[i] = id;
            }
        }
        for (int i = 1; i <= r_; ++i)
            if (state_[i] == PairState::Set && block_[i] == 0) block_[i] = i;
        exp_ = exponent;
        alive_q_ = alive_qp_ = true;
    }

    void set_seen(int class_id, int count) { seen_[class_id] = count; }

    PairState pair_state(int i) const { return state_[i]; }
    std::vector<int> block_members(int i) const {
        std::vector<int> out;
        for (int j = 1; j <= r_; ++j)
            if (state_[j] == PairState::Set && block_[j] == block_[i]) out.push_back(j);
        return out;
    }

    void step(int class_id) {
        if (dead()) return;
        int occ = ++seen_[class_id];
        const ClassInfo& ci = info_[class_id];
        switch (ci.kind) {
            case Kind::TreeOffPath:
                return;
            case Kind::PathMiddle:
                state_[r_] = PairState::Both;
                return;
            case Kind::PathPair:
                if (occ == 1) {
                    state_[ci.pair_index] = PairState::Set;
                    block_[ci.pair_index] = ci.pair_index;
                } else {
                    state_[ci.pair_index] = PairState::Both;
                }
                return;
            case Kind::OffPathInternal:
                if (!route_seen(ci)) kill_both();
                return;
            case Kind::Cross: {
                if (!route_seen(ci)) { kill_both(); return; }
                for (int i = 1; i <= r_; ++i)
                    if (state_[i] != PairState::Both) { alive_qp_ = false; break; }
                return;
            }
            case Kind::SideChord: {
                if (!route_seen(ci)) { kill_both(); return; }
                if (!requirements_met(ci)) return;  // killed inside
                apply_singles(ci, /*has_rep_coin=*/false, ci.side);
                return;
            }
            case Kind::PathChord: {
                if (occ == 2) {
                    for (int i : ci.both_pairs)
                        if (state_[i] != PairState::Both) { kill_both(); return; }
                    for (int i : ci.single_pairs)
                        if (state_[i] != PairState::Both) { kill_both(); return; }
                    return;
                }
                if (!requirements_met(ci)) return;
                if (ci.singleton_class) return;
                apply_singles(ci, /*has_rep_coin=*/true, PairState::Neither);
                return;
            }
        }
    }

    // Full Algorithm: iterate every folded permutation and average.
    std::pair<Rational, Rational> run(std::uint64_t folded_cap = 2000000ULL) {
        Integer folded = factorial(static_cast<unsigned>(g_.m()));
        mpz_fdiv_q_2exp(folded.get_mpz_t(), folded.get_mpz_t(), static_cast<mp_bitcnt_t>(a_));
        if (folded > Integer(static_cast<unsigned long>(folded_cap)))
            throw resource_cap_error("folded permutation count " + folded.get_str() +
                                     " exceeds cap " + std::to_string(folded_cap));
        std::vector<int> tokens;
        for (int c = 0; c < num_classes(); ++c)
            for (size_t k = 0; k < class_members_[c].size(); ++k) tokens.push_back(c);
        std::sort(tokens.begin(), tokens.end());

        std::vector<unsigned long long> hist_q(1024, 0), hist_qp(1024, 0);
        do {
            reset();
            for (int t : tokens) {
                step(t);
                if (dead()) break;
            }
            if (alive_q_) ++hist_q[static_cast<size_t>(exp_)];
            if (alive_qp_) ++hist_qp[static_cast<size_t>(exp_)];
        } while (std::next_permutation(tokens.begin(), tokens.end()));

        Rational scale = rat(Integer(1) << a_, factorial(static_cast<unsigned>(g_.m())));
        Rational p = 0, pp = 0;
        for (size_t e = 0; e < hist_q.size(); ++e) {
            if (hist_q[e]) p += Rational(static_cast<unsigned long>(hist_q[e])) * dyadic(static_cast<int>(e));
            if (hist_qp[e]) pp += Rational(static_cast<unsigned long>(hist_qp[e])) * dyadic(static_cast<int>(e));
        }
        return {scale * p, scale * pp};
    }

private:
    enum class Kind { TreeOffPath, PathPair, PathMiddle, SideChord, Cross, OffPathInternal, PathChord };

    struct ClassInfo {
        Kind kind = Kind::TreeOffPath;
        int pair_index = 0;                       // for PathPair
        PairState side = PairState::Neither;      // for SideChord: Left or Right
        bool singleton_class = false;             // for PathChord
        std::vector<int> both_pairs;              // pairs whose two members are both required
        std::vector<int> single_pairs;            // pairs with exactly one member required
        std::vector<int> route_classes;           // off-path tree edges on the broken cycle
    };

    static Rational dyadic(int e) { return rat(Integer(1), Integer(1) << e); }

    void kill_both() { alive_q_ = alive_qp_ = false; }

    bool route_seen(const ClassInfo& ci) const {
        for (int c : ci.route_classes)
            if (seen_[c] == 0) return false;
        return true;
    }

    // Shared kill logic: every both-pair must be Both, no single may be
    // untouched. Returns false after killing both trackers.
    bool requirements_met(const ClassInfo& ci) {
        for (int i : ci.both_pairs)
            if (state_[i] != PairState::Both) { kill_both(); return false; }
        for (int i : ci.single_pairs)
            if (state_[i] == PairState::Neither) { kill_both(); return false; }
        return true;
    }

    // Probability update over the single-member pairs. For side chords the
    // requirement side is fixed by which side the off-path endpoint lives on;
    // for chords the two class representatives play the role of a coin, which
    // costs one extra halving whenever a label pins the surviving choice.
    void apply_singles(const ClassInfo& ci, bool has_rep_coin, PairState side) {
        std::vector<int> blocks;
        bool saw_left = false, saw_right = false;
        for (int i : ci.single_pairs) {
            if (state_[i] == PairState::Set) {
                if (std::find(blocks.begin(), blocks.end(), block_[i]) == blocks.end())
                    blocks.push_back(block_[i]);
            } else if (state_[i] == PairState::Left) {
                saw_left = true;
            } else if (state_[i] == PairState::Right) {
                saw_right = true;
            }
        }
        exp_ += static_cast<int>(blocks.size());
        if (!has_rep_coin) {
            // Side chord: labels opposing the entry side rule out T' only.
            if ((side == PairState::Left && saw_right) || (side == PairState::Right && saw_left))
                alive_qp_ = false;
            collapse(blocks, side);
            return;
        }
        if (!saw_left && !saw_right) {
            merge(blocks);
            return;
        }
        exp_ += 1;  // the representative coin is pinned by the labels
        if (saw_left && saw_right) {
            alive_qp_ = false;
            collapse(blocks, PairState::Left);
        } else {
            collapse(blocks, saw_left ? PairState::Left : PairState::Right);
        }
    }

    void collapse(const std::vector<int>& blocks, PairState side) {
        for (int j = 1; j <= r_; ++j)
            if (state_[j] == PairState::Set &&
                std::find(blocks.begin(), blocks.end(), block_[j]) != blocks.end())
                state_[j] = side;
    }

    void merge(const std::vector<int>& blocks) {
        if (blocks.empty()) return;
        int id = *std::min_element(blocks.begin(), blocks.end());
        for (int j = 1; j <= r_; ++j)
            if (state_[j] == PairState::Set &&
                std::find(blocks.begin(), blocks.end(), block_[j]) != blocks.end())
                block_[j] = id;
    }

    void build() {
        const int l = inst_.len();
        if (l < 2) throw std::invalid_argument("path needs at least 2 vertices");
        if (inst_.left_edges.empty() || inst_.right_edges.empty())
            throw std::invalid_argument("L and R each need at least one edge");
        g_ = complete_graph(inst_.n);
        r_ = l / 2;

        pos_.assign(inst_.n, -1);
        for (int i = 0; i < l; ++i) {
            int v = inst_.path[i];
            if (v < 0 || v >= inst_.n || pos_[v] >= 0) throw std::invalid_argument("bad path");
            pos_[v] = i;
        }
        side_of_.assign(inst_.n, 0);  // 0 = path, 1 = left, 2 = right
        auto mark = [&](const std::vector<std::pair<int, int>>& es, int tag, int attach) {
            for (auto [u, v] : es)
                for (int w : {u, v}) {
                    if (w == attach) continue;
                    if (pos_[w] >= 0) throw std::invalid_argument("side tree touches the path interior");
                    if (side_of_[w] != 0 && side_of_[w] != tag)
                        throw std::invalid_argument("side trees overlap");
                    side_of_[w] = tag;
                }
        };
        mark(inst_.left_edges, 1, inst_.path.front());
        mark(inst_.right_edges, 2, inst_.path.back());
        for (int v = 0; v < inst_.n; ++v)
            if (pos_[v] < 0 && side_of_[v] == 0)
                throw std::invalid_argument("vertex belongs to neither the path nor a side tree");

        auto index_tree = [&](const std::vector<std::pair<int, int>>& pairs) {
            std::vector<int> idx;
            for (auto [u, v] : pairs) idx.push_back(g_.edge_index(u, v));
            std::sort(idx.begin(), idx.end());
            return idx;
        };
        tree_t_ = index_tree(inst_.tree_t_pairs());
        tree_tp_ = index_tree(inst_.tree_tprime_pairs());
        if (!is_spanning_tree(g_, tree_t_) || !is_spanning_tree(g_, tree_tp_))
            throw std::invalid_argument("instance does not define spanning trees");
        in_t_.assign(static_cast<size_t>(g_.m()), 0);
        for (int e : tree_t_) in_t_[static_cast<size_t>(e)] = 1;

        // Folded classes: edges with both endpoints on the path pair up with
        // their reflections; everything else is a singleton class.
        auto reflect_vertex = [&](int v) { return pos_[v] >= 0 ? inst_.path[l - 1 - pos_[v]] : v; };
        cls_of_.assign(g_.m(), -1);
        for (int e = 0; e < g_.m(); ++e) {
            if (cls_of_[e] >= 0) continue;
            auto [u, v] = g_.edges[e];
            int partner = e;
            if (pos_[u] >= 0 && pos_[v] >= 0) partner = g_.edge_index(reflect_vertex(u), reflect_vertex(v));
            int id = static_cast<int>(class_members_.size());
            cls_of_[e] = id;
            if (partner != e) cls_of_[partner] = id;
            class_members_.push_back(partner == e ? std::vector<int>{e} : std::vector<int>{e, partner});
        }
        a_ = 0;
        for (const auto& mem : class_members_)
            if (mem.size() == 2) ++a_;

        // Tree adjacency of T for broken-cycle routes.
        std::vector<std::vector<std::pair<int, int>>> adj(inst_.n);
        for (int e : tree_t_) {
            auto [u, v] = g_.edges[e];
            adj[u].emplace_back(v, e);
            adj[v].emplace_back(u, e);
        }
        auto tree_route = [&](int src, int dst) {
            std::vector<int> parent(inst_.n, -1), pedge(inst_.n, -1);
            std::vector<int> stack{src};
            std::vector<bool> vis(inst_.n, false);
            vis[src] = true;
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                for (auto [w, e] : adj[u])
                    if (!vis[w]) {
                        vis[w] = true;
                        parent[w] = u;
                        pedge[w] = e;
                        stack.push_back(w);
                    }
            }
            std::vector<int> edges;
            for (int v = dst; v != src; v = parent[v]) edges.push_back(pedge[v]);
            return edges;
        };

        info_.assign(num_classes(), ClassInfo{});
        for (int c = 0; c < num_classes(); ++c) {
            int e = class_members_[c][0];
            auto [u, v] = g_.edges[e];
            ClassInfo ci;
            bool u_on = pos_[u] >= 0, v_on = pos_[v] >= 0;
            bool in_t = in_t_[static_cast<size_t>(e)] != 0;
            if (u_on && v_on) {
                int i1 = std::min(pos_[u], pos_[v]) + 1;  // 1-based positions
                int i2 = std::max(pos_[u], pos_[v]) + 1;
                if (i2 == i1 + 1) {
                    // Path edge number i1; folded index min(i1, l - i1).
                    if (class_members_[c].size() == 1) {
                        ci.kind = Kind::PathMiddle;
                    } else {
                        ci.kind = Kind::PathPair;
                        ci.pair_index = std::min(i1, l - i1);
                    }
                } else {
                    ci.kind = Kind::PathChord;
                    ci.singleton_class = class_members_[c].size() == 1;
                    fill_requirements(ci, i1, i2 - 1, l);
                }
            } else if (u_on || v_on) {
                if (in_t) {
                    ci.kind = Kind::TreeOffPath;
                } else {
                    int w = u_on ? v : u;
                    int pv = u_on ? u : v;
                    ci.kind = Kind::SideChord;
                    ci.side = side_of_[w] == 1 ? PairState::Left : PairState::Right;
                    int j = pos_[pv] + 1;
                    fill_requirements(ci, 1, j - 1, l);
                    for (int re : tree_route(w, inst_.path.front()))
                        if (!both_on_path(re)) ci.route_classes.push_back(cls_of_[re]);
                }
            } else {
                if (in_t) {
                    ci.kind = Kind::TreeOffPath;
                } else if (side_of_[u] == side_of_[v]) {
                    ci.kind = Kind::OffPathInternal;
                    for (int re : tree_route(u, v))
                        if (!both_on_path(re)) ci.route_classes.push_back(cls_of_[re]);
                } else {
                    ci.kind = Kind::Cross;
                    for (int w : {u, v})
                        for (int re : tree_route(w, inst_.path.front()))
                            if (!both_on_path(re)) ci.route_classes.push_back(cls_of_[re]);
                }
            }
            info_[c] = ci;
        }

        state_.assign(r_ + 1, PairState::Neither);
        block_.assign(r_ + 1, 0);
        seen_.assign(num_classes(), 0);
        reset();
    }

    bool both_on_path(int e) const {
        auto [u, v] = g_.edges[e];
        return pos_[u] >= 0 && pos_[v] >= 0;
    }

    // Requirements imposed by a broken cycle covering path edges [lo, hi]
    // (1-based): a pair with both members covered must be fully present; a
    // pair with one member covered contributes a single-sided condition.
    void fill_requirements(ClassInfo& ci, int lo, int hi, int l) {
        for (int i = 1; i <= r_; ++i) {
            int mirror = l - i;
            bool has_self = lo <= i && i <= hi;
            bool has_mirror = (mirror != i) && lo <= mirror && mirror <= hi;
            if (mirror == i) {
                if (has_self) ci.both_pairs.push_back(i);  // middle edge needs Both
            } else if (has_self && has_mirror) {
                ci.both_pairs.push_back(i);
            } else if (has_self || has_mirror) {
                ci.single_pairs.push_back(i);
            }
        }
    }

    PathRotationInstance inst_;
    Graph g_;
    int r_ = 0;
    int a_ = 0;
    std::vector<int> pos_;
    std::vector<int> side_of_;
    std::vector<int> cls_of_;
    std::vector<std::vector<int>> class_members_;
    std::vector<ClassInfo> info_;
    std::vector<int> tree_t_, tree_tp_;
    std::vector<char> in_t_;

    std::vector<PairState> state_;  // 1-based
    std::vector<int> block_;
    std::vector<int> seen_;
    int exp_ = 0;
    bool alive_q_ = true, alive_qp_ = true;
};

// P_MST(T) and P_MST(T') for a path rotation instance.
inline std::pair<Rational, Rational> path_rotation_probs(const PathRotationInstance& inst,
                                                         std::uint64_t folded_cap = 2000000ULL) {
    PathRotationEngine engine(inst);
    return engine.run(folded_cap);
}

}  // namespace treeprob
