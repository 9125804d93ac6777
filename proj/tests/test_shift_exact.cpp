#include <catch2/catch.hpp>

#include "test_helpers.hpp"
#include "treeprob/sampler.hpp"
#include "treeprob/theta.hpp"

using namespace treeprob;
using testing::square_with_diagonal;

namespace {

// Random non-colliding spec: distinct rational atoms plus uniform pieces.
ProductMeasureSpec random_spec(int m, SplitMix64& rng) {
    ProductMeasureSpec spec;
    long atom_serial = 0;
    for (int i = 0; i < m; ++i) {
        EdgeMeasure em;
        int n_atoms = static_cast<int>(rng.next_below(3));
        int n_pieces = static_cast<int>(rng.next_below(2)) + (n_atoms == 0 ? 1 : 0);
        std::vector<Rational> masses;
        int parts = n_atoms + n_pieces;
        Rational left = 1;
        for (int p = 0; p < parts; ++p) {
            Rational w = p + 1 == parts ? left : left / 2;
            masses.push_back(w);
            left -= w;
        }
        size_t mi = 0;
        for (int a = 0; a < n_atoms; ++a) {
            // Locations unique across the whole spec.
            Rational loc = rat(static_cast<long>(rng.next_below(40)), 7) +
                           rat(++atom_serial, 100000) + rat(static_cast<long>(i), 1000);
            em.atoms.push_back({loc, masses[mi++]});
        }
        for (int p = 0; p < n_pieces; ++p) {
            Rational lo = rat(static_cast<long>(rng.next_below(30)), 10);
            Rational hi = lo + rat(static_cast<long>(rng.next_below(20)) + 1, 10);
            em.uniforms.push_back({lo, hi, masses[mi++]});
        }
        spec.vars.push_back(em);
    }
    spec.validate();
    return spec;
}

}  // namespace

TEST_CASE("closing gaps") {
    ShiftVector two{rat(0), rat(5)};
    auto closed = closing_gaps(two);
    CHECK(shiftahedron_contains(closed));
    CHECK(closed[1] == closed[0] + 1);  // the oversized gap collapsed to one

    // Hand-applied on (0, 5/2, 3/10): sorted gaps close to (0, 3/10, 13/10),
    // then the whole vector translates into the shiftahedron.
    ShiftVector three{rat(0), rat(5, 2), rat(3, 10)};
    auto closed3 = closing_gaps(three);
    CHECK(shiftahedron_contains(closed3));
    CHECK(closed3[2] - closed3[0] == rat(3, 10));
    CHECK(closed3[1] - closed3[2] == rat(1));

    // Already gap-free vectors move only by translation.
    ShiftVector inside{rat(1), rat(3, 2), rat(2)};
    auto closed_inside = closing_gaps(inside);
    CHECK(closed_inside[1] - closed_inside[0] == rat(1, 2));
    CHECK(closed_inside[2] - closed_inside[1] == rat(1, 2));

    // Order distributions are preserved exactly.
    for (const ShiftVector& s :
         {two, three, ShiftVector{rat(0), rat(7, 2), rat(-2), rat(1, 3)}}) {
        auto before = order_distribution_exact(shift_measure(s));
        auto after = order_distribution_exact(shift_measure(closing_gaps(s)));
        CHECK(before == after);
    }
}

TEST_CASE("shiftahedron membership") {
    CHECK(shiftahedron_contains({rat(1), rat(2), rat(3)}));
    CHECK(shiftahedron_contains({rat(2), rat(2), rat(2)}));
    CHECK_FALSE(shiftahedron_contains({rat(0), rat(0), rat(6)}));
    CHECK(shiftahedron_contains({rat(2), rat(3), rat(1)}));  // any reordering of an extreme point
}

TEST_CASE("exact order probabilities") {
    // Disjoint supports order deterministically.
    ProductMeasureSpec spec;
    spec.vars.push_back({{}, {{rat(0), rat(1), rat(1)}}});
    spec.vars.push_back({{}, {{rat(2), rat(3), rat(1)}}});
    CHECK(perm_prob_exact(spec, {0, 1}) == 1);
    CHECK(perm_prob_exact(spec, {1, 0}) == 0);

    // Three identical intervals: every order at 1/6.
    ProductMeasureSpec iid;
    for (int i = 0; i < 3; ++i) iid.vars.push_back({{}, {{rat(0), rat(1), rat(1)}}});
    for (const auto& [sigma, p] : order_distribution_exact(iid)) CHECK(p == rat(1, 6));

    // Half-overlapping intervals: P(X2 < X1) = 1/8, plus a sampling check.
    ProductMeasureSpec overlap;
    overlap.vars.push_back({{}, {{rat(0), rat(1), rat(1)}}});
    overlap.vars.push_back({{}, {{rat(1, 2), rat(3, 2), rat(1)}}});
    CHECK(perm_prob_exact(overlap, {1, 0}) == rat(1, 8));
    SamplerConfig cfg{99, 200000, 1, 1};
    auto counts = sample_order_counts(overlap, cfg);
    double freq = static_cast<double>(counts[{1, 0}]) / static_cast<double>(cfg.samples);
    double sigma = std::sqrt(0.125 * 0.875 / static_cast<double>(cfg.samples));
    CHECK(std::fabs(freq - 0.125) < 3 * sigma);

    // Colliding atoms are rejected.
    ProductMeasureSpec bad;
    bad.vars.push_back({{{rat(1), rat(1)}}, {}});
    bad.vars.push_back({{{rat(1), rat(1)}}, {}});
    CHECK_THROWS_AS(perm_prob_exact(bad, {0, 1}), std::invalid_argument);
}

TEST_CASE("order probabilities sum to one") {
    SplitMix64 rng(5150);
    for (int m = 2; m <= 5; ++m) {
        for (int rep = 0; rep < 3; ++rep) {
            auto spec = random_spec(m, rng);
            Rational total = 0;
            for (const auto& [sigma, p] : order_distribution_exact(spec)) {
                CHECK(p >= 0);
                total += p;
            }
            CHECK(total == 1);
        }
    }
}

TEST_CASE("iid shifted measure reproduces ordinary MST") {
    Graph g = square_with_diagonal();
    ShiftVector zero(5, rat(0));
    auto shifted = shift_tree_distribution(g, zero);
    MstExact engine(g);
    CHECK(shifted == engine.mst_distribution());
}

TEST_CASE("translation invariance of shifted distributions") {
    Graph g = square_with_diagonal();
    ShiftVector s{rat(0), rat(1, 4), rat(0), rat(1, 8), rat(1, 2)};
    ShiftVector t = s;
    for (auto& v : t) v += rat(7, 3);
    CHECK(shift_tree_distribution(g, s) == shift_tree_distribution(g, t));
}

TEST_CASE("a fully shifted diagonal never enters the tree") {
    Graph g = square_with_diagonal();
    ShiftVector s(5, rat(0));
    s[4] = 1;  // diagonal support [1,2] sits above every square edge
    auto dist = shift_tree_distribution(g, s);
    CHECK(dist.size() == 4);
    for (const auto& [t, p] : dist) {
        CHECK(std::find(t.begin(), t.end(), 4) == t.end());
        CHECK(p == rat(1, 4));
    }
}

TEST_CASE("non-overlapping intervals on K_4 break uniformity") {
    Graph k4 = complete_graph(4);
    ShiftVector s(6, rat(0));
    s[0] = 2;  // edge 0's interval sits entirely above the others
    auto dist = shift_tree_distribution(k4, s);
    CHECK(total_variation(dist, uniform_tree_distribution(k4)) > 0);
}

TEST_CASE("shifts do not reach UST on K_4") {
    Graph k4 = complete_graph(4);
    auto ust = uniform_tree_distribution(k4);
    // Rational grid over two-coordinate slices of the shift space.
    for (long a = 0; a <= 4; ++a)
        for (long b = 0; b <= 4; ++b) {
            ShiftVector s(6, rat(0));
            s[0] = rat(a, 4);
            s[3] = rat(b, 4);
            CHECK(total_variation(shift_tree_distribution(k4, s), ust) > 0);
        }
}

TEST_CASE("identically distributed adjacent edges break uniformity on K_4") {
    Graph k4 = complete_graph(4);
    // Edges (0,1) and (0,2) share the same interval; the rest differ.
    ShiftVector s(6, rat(0));
    s[static_cast<size_t>(k4.edge_index(1, 2))] = rat(1, 8);
    s[static_cast<size_t>(k4.edge_index(1, 3))] = rat(1, 16);
    s[static_cast<size_t>(k4.edge_index(2, 3))] = rat(3, 16);
    s[static_cast<size_t>(k4.edge_index(0, 3))] = rat(1, 32);
    auto dist = shift_tree_distribution(k4, s);
    // Rotation-related pair: S = {(1,3),(0,1),(1,2)}, S' = {(1,3),(0,2),(1,2)}.
    std::vector<int> tree_s{k4.edge_index(1, 3), k4.edge_index(0, 1), k4.edge_index(1, 2)};
    std::vector<int> tree_sp{k4.edge_index(1, 3), k4.edge_index(0, 2), k4.edge_index(1, 2)};
    std::sort(tree_s.begin(), tree_s.end());
    std::sort(tree_sp.begin(), tree_sp.end());
    CHECK(dist.at(tree_s) != dist.at(tree_sp));
    CHECK(total_variation(dist, uniform_tree_distribution(k4)) > 0);
}

TEST_CASE("K_4 measure with atoms recovers the uniform tree distribution") {
    Graph k4 = complete_graph(4);
    ProductMeasureSpec spec;
    spec.vars.resize(6);
    int e01 = k4.edge_index(0, 1), e23 = k4.edge_index(2, 3);
    for (int e = 0; e < 6; ++e) {
        if (e == e01) spec.vars[static_cast<size_t>(e)] = {{{rat(1, 20), rat(1, 2)}, {rat(1), rat(1, 2)}}, {}};
        else if (e == e23) spec.vars[static_cast<size_t>(e)] = {{{rat(0), rat(1, 2)}, {rat(19, 20), rat(1, 2)}}, {}};
        else spec.vars[static_cast<size_t>(e)] = {{}, {{rat(1, 4), rat(3, 4), rat(1)}}};
    }
    auto dist = tree_distribution_exact(k4, spec);
    CHECK(dist.size() == 16);
    for (const auto& [t, p] : dist) CHECK(p == rat(1, 16));
}

TEST_CASE("theta closed forms") {
    CHECK(theta_mst0_tree_prob(2, 2, 1) == rat(7, 60));
    // Square with diagonal as theta(2,1,2): diagonal type total is 8/15.
    CHECK(theta_mst0_type_prob(1, 2, 2) == rat(8, 15));
    ThetaReport rep = theta_report(2, 1, 2);
    CHECK(rep.tree_count == 8);
    CHECK(rep.mst0_type[1] == rat(8, 15));
    CHECK(rep.mst0_tree[1] == rat(2, 15));
    CHECK(rep.ust_tree == rat(1, 8));

    // Closed forms agree with the exact engine on MST0.
    for (auto [r, s, t] : std::vector<std::array<int, 3>>{{2, 1, 2}, {2, 2, 2}, {3, 1, 2}}) {
        Graph g = theta_graph(r, s, t);
        MstExact engine(g);
        auto dist = engine.mst_distribution();
        std::array<Rational, 3> type{0, 0, 0};
        std::array<int, 3> lens{r, s, t};
        for (const auto& [tree, p] : dist) {
            EdgeMask tm = edges_to_mask(tree);
            int offset = 0;
            for (int which = 0; which < 3; ++which) {
                bool all = true;
                for (int e = offset; e < offset + lens[static_cast<size_t>(which)]; ++e)
                    if (!mask_contains(tm, e)) all = false;
                if (all) type[static_cast<size_t>(which)] += p;
                offset += lens[static_cast<size_t>(which)];
            }
        }
        ThetaReport want = theta_report(r, s, t);
        CHECK(type[0] == want.mst0_type[0]);
        CHECK(type[1] == want.mst0_type[1]);
        CHECK(type[2] == want.mst0_type[2]);
    }

    // theta(r,r,r) hits UST with zero shifts.
    Graph th = theta_graph(2, 2, 2);
    MstExact engine(th);
    CHECK(engine.mst_distribution() == uniform_tree_distribution(th));
}

TEST_CASE("shifted theta type probabilities match the full integration engine") {
    for (auto [r, s, t] : std::vector<std::array<int, 3>>{{2, 1, 2}, {2, 2, 1}, {3, 1, 2}}) {
        Graph g = theta_graph(r, s, t);
        std::array<Rational, 3> shifts{rat(1, 16), rat(1, 10), rat(0)};
        ShiftVector s_edges;
        for (int i = 0; i < r; ++i) s_edges.push_back(shifts[0]);
        for (int i = 0; i < s; ++i) s_edges.push_back(shifts[1]);
        for (int i = 0; i < t; ++i) s_edges.push_back(shifts[2]);
        auto dist = shift_tree_distribution(g, s_edges);
        std::array<Rational, 3> type{0, 0, 0};
        std::array<int, 3> lens{r, s, t};
        for (const auto& [tree, p] : dist) {
            EdgeMask tm = edges_to_mask(tree);
            int offset = 0;
            for (int which = 0; which < 3; ++which) {
                bool all = true;
                for (int e = offset; e < offset + lens[static_cast<size_t>(which)]; ++e)
                    if (!mask_contains(tm, e)) all = false;
                if (all) type[static_cast<size_t>(which)] += p;
                offset += lens[static_cast<size_t>(which)];
            }
        }
        auto fast = theta_type_probs_shifted(r, s, t, shifts[0], shifts[1], shifts[2]);
        CHECK(fast[0] == type[0]);
        CHECK(fast[1] == type[1]);
        CHECK(fast[2] == type[2]);

        ThetaReport rep = theta_report(r, s, t, shifts);
        REQUIRE(rep.shifted_type.has_value());
        CHECK(*rep.shifted_type == fast);
    }
}

TEST_CASE("theta UST shift solving") {
    // Square with a diagonal: the diagonal shift solves the known quintic.
    auto shifts = solve_theta_ust_shift(2, 1, 2);
    Rational eps = shifts[1] - shifts[0];
    Rational residual = 6 * pow_rational(eps, 5) - 20 * pow_rational(eps, 3) + 30 * eps - 1;
    CHECK(rational_abs(residual) < rat(1, 1000000000L));
    CHECK(eps.get_d() > 0.03);
    CHECK(eps.get_d() < 0.04);

    CHECK(solve_theta_ust_shift(2, 2, 2) == std::array<Rational, 3>{0, 0, 0});

    // theta(3,1,3): solver output verified with the full engine.
    auto s313 = solve_theta_ust_shift(3, 1, 3);
    Graph g = theta_graph(3, 1, 3);
    ShiftVector sv;
    for (int i = 0; i < 3; ++i) sv.push_back(s313[0]);
    sv.push_back(s313[1]);
    for (int i = 0; i < 3; ++i) sv.push_back(s313[2]);
    Rational tv = total_variation(shift_tree_distribution(g, sv), uniform_tree_distribution(g));
    CHECK(tv < rat(1, 1000000000L));
}

TEST_CASE("displayed theta difference formula disagrees with both direct readings") {
    // Only the sign statement holds; the displayed closed form matches
    // neither the per-type nor the per-tree difference at (2,2,1).
    CHECK(theta_u_minus_m_display(2, 2, 1) == rat(1, 12));
    CHECK(theta_u_minus_m_per_type(2, 2, 1) == rat(1, 60));
    CHECK(theta_u_minus_m_per_tree(2, 2, 1) == rat(1, 120));
    for (int r = 1; r <= 4; ++r)
        for (int s = 1; s <= r; ++s)
            for (int t = 1; t <= s; ++t) {
                if (r == s && s == t) {
                    CHECK(theta_u_minus_m_per_type(r, s, t) == 0);
                    CHECK(theta_u_minus_m_per_tree(r, s, t) == 0);
                } else {
                    CHECK(theta_u_minus_m_per_type(r, s, t) > 0);
                    CHECK(theta_u_minus_m_per_tree(r, s, t) > 0);
                }
            }
}

TEST_CASE("snowman-free graphs") {
    CHECK(is_snowman_free(theta_graph(2, 2, 2)));
    CHECK_FALSE(is_snowman_free(theta_graph(7, 1, 5)));
    CHECK(is_snowman_free(Graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}})));
    CHECK(is_snowman_free(cycle_graph(6)));
    CHECK_FALSE(is_snowman_free(complete_graph(4)));
    CHECK_FALSE(is_snowman_free(square_with_diagonal()));
}
