#include <catch2/catch.hpp>

#include "test_helpers.hpp"
#include "treeprob/mst_exact.hpp"
#include "treeprob/path_rotation.hpp"

using namespace treeprob;
using PS = PathRotationEngine::PairState;

namespace {

// Oracle: the survival probabilities of one folded permutation, by
// enumerating all 2^a lifts on each side and running Kruskal on each.
std::pair<Rational, Rational> lift_oracle(const PathRotationEngine& eng,
                                          const PathRotationInstance& inst,
                                          const std::vector<int>& rho) {
    const Graph& g = eng.ambient();
    const int l = inst.len();
    auto pos = [&](int v) {
        for (int i = 0; i < l; ++i)
            if (inst.path[i] == v) return i;
        return -1;
    };
    auto reflect = [&](int v) {
        int p = pos(v);
        return p < 0 ? v : inst.path[static_cast<size_t>(l - 1 - p)];
    };
    std::vector<int> side(inst.n, 0);
    for (auto [u, v] : inst.left_edges)
        for (int w : {u, v})
            if (w != inst.path.front() && pos(w) < 0) side[w] = 1;
    for (auto [u, v] : inst.right_edges)
        for (int w : {u, v})
            if (w != inst.path.back() && pos(w) < 0) side[w] = 2;

    const int nc = eng.num_classes();
    std::vector<std::vector<int>> members(nc), members_beta(nc);
    for (int e = 0; e < g.m(); ++e) {
        auto [u, v] = g.edges[e];
        int c = eng.class_of_edge(u, v);
        if (std::find(members[c].begin(), members[c].end(), e) == members[c].end())
            members[c].push_back(e);
        int bu = u, bv = v;
        bool u_on = pos(u) >= 0, v_on = pos(v) >= 0;
        if (u_on != v_on) {
            int w = u_on ? v : u, pv = u_on ? u : v;
            if (side[w] == 2) {
                bu = w;
                bv = reflect(pv);
            }
        }
        int be = g.edge_index(bu, bv);
        if (std::find(members_beta[c].begin(), members_beta[c].end(), be) == members_beta[c].end())
            members_beta[c].push_back(be);
    }

    std::vector<int> firstpos(nc, -1);
    std::vector<int> pair_classes;
    for (size_t k = 0; k < rho.size(); ++k) {
        if (firstpos[rho[k]] < 0) firstpos[rho[k]] = static_cast<int>(k);
        else pair_classes.push_back(rho[k]);
    }
    const int a = static_cast<int>(pair_classes.size());
    auto t_target = eng.tree_t();
    auto tp_target = eng.tree_tprime();
    long good = 0, goodp = 0;
    for (long bits = 0; bits < (1L << a); ++bits) {
        std::vector<int> order(rho.size()), orderp(rho.size());
        for (size_t k = 0; k < rho.size(); ++k) {
            int c = rho[k];
            int which = 0;
            if (members[c].size() == 2) {
                int pi = -1;
                for (int j = 0; j < a; ++j)
                    if (pair_classes[static_cast<size_t>(j)] == c) pi = j;
                bool flip = (bits >> pi) & 1;
                bool is_first = static_cast<int>(k) == firstpos[c];
                which = (is_first == !flip) ? 0 : 1;
            }
            order[k] = members[c][static_cast<size_t>(which)];
            orderp[k] = members_beta[c][static_cast<size_t>(which)];
        }
        if (kruskal_select(g, order) == t_target) ++good;
        if (kruskal_select(g, orderp) == tp_target) ++goodp;
    }
    return {rat(good, 1L << a), rat(goodp, 1L << a)};
}

PathRotationInstance k5_instance() {
    PathRotationInstance inst;
    inst.n = 5;
    inst.path = {0, 1, 2};
    inst.left_edges = {{3, 0}};
    inst.right_edges = {{4, 2}};
    return inst;
}

}  // namespace

TEST_CASE("path rotation instances derive the right tree pair") {
    PathRotationInstance inst = k5_instance();
    PathRotationEngine eng(inst);
    Graph k5 = complete_graph(5);
    // T: everything at v_1 = 0 (fork); T': the spanning path 3-0-1-2-4.
    std::vector<int> fork{k5.edge_index(3, 0), k5.edge_index(4, 0), k5.edge_index(0, 1),
                          k5.edge_index(1, 2)};
    std::sort(fork.begin(), fork.end());
    std::vector<int> path{k5.edge_index(3, 0), k5.edge_index(0, 1), k5.edge_index(1, 2),
                          k5.edge_index(2, 4)};
    std::sort(path.begin(), path.end());
    CHECK(eng.tree_t() == fork);
    CHECK(eng.tree_tprime() == path);
    CHECK(eng.pair_class_count() == 1);  // a = (C(3,2) - 1)/2
}

TEST_CASE("path rotation agrees with the exact engine on K_5") {
    MstExact engine(complete_graph(5));
    auto check_instance = [&](PathRotationInstance inst) {
        PathRotationEngine eng(inst);
        auto [pt, ptp] = eng.run(4000000ULL);
        CHECK(pt == engine.mst_prob_internal(eng.tree_t()));
        CHECK(ptp == engine.mst_prob_internal(eng.tree_tprime()));
        CHECK(pt > ptp);
    };
    check_instance(k5_instance());
    // l = 2 with both splits of the side trees, in both shapes.
    {
        PathRotationInstance inst;
        inst.n = 5;
        inst.path = {0, 1};
        inst.left_edges = {{2, 0}};
        inst.right_edges = {{3, 1}, {4, 3}};  // path-shaped right tree
        check_instance(inst);
        inst.right_edges = {{3, 1}, {4, 1}};  // star-shaped right tree
        check_instance(inst);
        inst.left_edges = {{2, 0}, {3, 2}};
        inst.right_edges = {{4, 1}};
        check_instance(inst);
    }
}

TEST_CASE("folded permutation cap") {
    CHECK_THROWS_AS(path_rotation_probs(k5_instance(), 100), resource_cap_error);
}

TEST_CASE("processing trace of the simple l = 5 example") {
    // Eight-step trace on an l = 5 rotation in K_7: q and q' fall
    // 1 -> 1/4 -> 1/8, then the right-side chord rules out T' only.
    PathRotationInstance inst;
    inst.n = 7;
    inst.path = {0, 1, 2, 3, 4};
    inst.left_edges = {{5, 0}};
    inst.right_edges = {{6, 4}};
    PathRotationEngine eng(inst);
    eng.reset();

    eng.step(eng.class_of_edge(0, 1));  // pair 1, first time
    eng.step(eng.class_of_edge(1, 2));  // pair 2, first time
    CHECK(eng.q() == 1);
    CHECK(eng.qprime() == 1);

    eng.step(eng.class_of_edge(0, 2));  // chord entangling pairs 1 and 2
    CHECK(eng.q() == rat(1, 4));
    CHECK(eng.qprime() == rat(1, 4));
    CHECK(eng.pair_state(1) == PS::Set);
    CHECK(eng.block_members(1) == std::vector<int>{1, 2});

    eng.step(eng.class_of_edge(5, 0));  // L attach edge: in both trees
    eng.step(eng.class_of_edge(6, 0));  // R attach edge of T
    CHECK(eng.q() == rat(1, 4));
    CHECK(eng.qprime() == rat(1, 4));

    eng.step(eng.class_of_edge(5, 1));  // side chord: collapses the block left
    CHECK(eng.q() == rat(1, 8));
    CHECK(eng.qprime() == rat(1, 8));
    CHECK(eng.pair_state(1) == PS::Left);
    CHECK(eng.pair_state(2) == PS::Left);

    eng.step(eng.class_of_edge(1, 2));  // pair 2, second time
    CHECK(eng.pair_state(2) == PS::Both);

    eng.step(eng.class_of_edge(6, 2));  // right-side chord: kills T' only
    CHECK(eng.q() == rat(1, 8));
    CHECK(eng.qprime() == 0);
}

TEST_CASE("state transitions of the l = 14 fixture") {
    PathRotationInstance inst;
    inst.n = 16;
    inst.path = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
    inst.left_edges = {{14, 0}};
    inst.right_edges = {{15, 13}};
    PathRotationEngine eng(inst);

    const std::vector<PS> start{PS::Right, PS::Set, PS::Neither, PS::Set,
                                PS::Set,   PS::Set, PS::Both};
    auto prime = [&](std::vector<int> extra_seen_pairs = {}) {
        eng.reset();
        eng.set_state(start, {{4, 5}}, 2);  // q = q' = 1/4
        // The broken-cycle routes into the side trees must count as seen.
        eng.set_seen(eng.class_of_edge(14, 0), 1);
        eng.set_seen(eng.class_of_edge(15, 0), 1);
        // Pair classes already reflected in the state were seen once.
        for (int i : {1, 2, 4, 5, 6}) eng.set_seen(eng.class_of_edge(i - 1, i), 1);
        eng.set_seen(eng.class_of_edge(6, 7), 1);  // middle edge (Both)
        for (int i : extra_seen_pairs) eng.set_seen(eng.class_of_edge(i - 1, i), 2);
    };

    SECTION("first sighting of a path pair") {
        prime();
        eng.set_seen(eng.class_of_edge(2, 3), 0);
        eng.step(eng.class_of_edge(2, 3));  // [e_3]
        CHECK(eng.pair_state(3) == PS::Set);
        CHECK(eng.q() == rat(1, 4));
        CHECK(eng.qprime() == rat(1, 4));
    }
    SECTION("second sighting turns a pair Both and prunes blocks") {
        prime();
        eng.step(eng.class_of_edge(3, 4));  // [e_4] again
        CHECK(eng.pair_state(4) == PS::Both);
        CHECK(eng.pair_state(5) == PS::Set);
        CHECK(eng.block_members(5) == std::vector<int>{5});
        CHECK(eng.q() == rat(1, 4));
    }
    SECTION("an unseen class on the broken cycle kills both trees") {
        prime();
        eng.step(eng.class_of_edge(14, 3));  // route crosses the unseen pair 3
        CHECK(eng.q() == 0);
        CHECK(eng.qprime() == 0);
    }
    SECTION("a left-right chord rules out the rotated tree") {
        prime();
        eng.step(eng.class_of_edge(14, 15));
        CHECK(eng.q() == rat(1, 4));
        CHECK(eng.qprime() == 0);
    }
    SECTION("side chord halves both and collapses its blocks") {
        prime();
        eng.step(eng.class_of_edge(15, 2));  // right-side chord over pairs 1..2
        CHECK(eng.q() == rat(1, 8));
        CHECK(eng.qprime() == rat(1, 8));
        CHECK(eng.pair_state(2) == PS::Right);
        CHECK(eng.pair_state(4) == PS::Set);
    }
    SECTION("side chord against the recorded side kills the rotated tree") {
        prime();
        eng.step(eng.class_of_edge(14, 1));  // left-side chord, pair 1 is Right
        CHECK(eng.q() == rat(1, 4));
        CHECK(eng.qprime() == 0);
    }
    SECTION("a crossing chord needing unresolved full pairs kills both") {
        prime();
        eng.step(eng.class_of_edge(5, 9));  // needs pair 6 fully present
        CHECK(eng.q() == 0);
        CHECK(eng.qprime() == 0);
    }
    SECTION("a chord across open pairs entangles them") {
        prime();
        eng.step(eng.class_of_edge(3, 6));  // pairs 4,5,6 merge
        CHECK(eng.q() == rat(1, 16));
        CHECK(eng.qprime() == rat(1, 16));
        CHECK(eng.pair_state(4) == PS::Set);
        CHECK(eng.block_members(4) == std::vector<int>{4, 5, 6});
    }
    SECTION("a chord with a labeled pair collapses the block to the label") {
        prime();
        eng.step(eng.class_of_edge(0, 2));  // pairs 1 (Right) and 2 (set)
        CHECK(eng.q() == rat(1, 16));
        CHECK(eng.qprime() == rat(1, 16));
        CHECK(eng.pair_state(2) == PS::Right);
    }
    SECTION("a beyond-middle side chord needs everything Both") {
        prime();
        eng.set_seen(eng.class_of_edge(2, 3), 0);
        eng.step(eng.class_of_edge(2, 3));  // pair 3 appears
        eng.step(eng.class_of_edge(15, 10));  // broken cycle spans pairs 4..7
        CHECK(eng.q() == 0);
        CHECK(eng.qprime() == 0);
    }
}

TEST_CASE("per-permutation survival matches exhaustive lift enumeration") {
    SplitMix64 rng(90125);
    for (int testcase = 0; testcase < 2; ++testcase) {
        PathRotationInstance inst;
        if (testcase == 0) {
            inst.n = 6;
            inst.path = {0, 1, 2, 3};
            inst.left_edges = {{4, 0}};
            inst.right_edges = {{5, 3}};
        } else {
            inst.n = 7;
            inst.path = {0, 1, 2, 3, 4};
            inst.left_edges = {{5, 0}};
            inst.right_edges = {{6, 4}};
        }
        PathRotationEngine eng(inst);
        const Graph& g = eng.ambient();
        std::vector<int> base;
        for (int e = 0; e < g.m(); ++e)
            base.push_back(eng.class_of_edge(g.edges[e].first, g.edges[e].second));
        for (int it = 0; it < 400; ++it) {
            std::vector<int> rho = base;
            for (size_t i = rho.size(); i > 1; --i) std::swap(rho[i - 1], rho[rng.next_below(i)]);
            eng.reset();
            for (int c : rho) eng.step(c);
            auto [oq, oqp] = lift_oracle(eng, inst, rho);
            CHECK(eng.q() == oq);
            CHECK(eng.qprime() == oqp);
        }
    }
}
