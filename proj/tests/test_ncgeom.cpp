#include <gtest/gtest.h>

#include <random>

#include "dunce/pic.hpp"

using namespace dunce;

namespace {

using Rational = boost::multiprecision::cpp_rational;

// b1 of the incidence graph = edges - rank(incidence matrix over Q)
int graph_b1_oracle(const CurveIncidenceGraph& g) {
    const int n = g.components + g.points();
    std::vector<std::vector<double>> m(g.edges.size(), std::vector<double>(n, 0.0));
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        m[e][g.edges[e].first] += 1;
        m[e][g.components + g.edges[e].second] -= 1;
    }
    int rank = 0;
    for (int c = 0; c < n && rank < static_cast<int>(m.size()); ++c) {
        int piv = -1;
        for (int r = rank; r < static_cast<int>(m.size()); ++r)
            if (std::abs(m[r][c]) > 1e-9) piv = r;
        if (piv < 0) continue;
        std::swap(m[piv], m[rank]);
        for (int r = 0; r < static_cast<int>(m.size()); ++r) {
            if (r == rank) continue;
            double f = m[r][c] / m[rank][c];
            for (int k = 0; k < n; ++k) m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    return static_cast<int>(g.edges.size()) - rank;
}

CurveIncidenceGraph random_graph(std::mt19937& rng) {
    std::uniform_int_distribution<int> kd(1, 4), sd(0, 4), md(2, 4);
    CurveIncidenceGraph g;
    g.components = kd(rng);
    std::uniform_int_distribution<int> comp(0, g.components - 1);
    const int s = sd(rng);
    for (int j = 0; j < s; ++j) {
        int m = md(rng);
        g.multiplicity.push_back(m);
        for (int i = 0; i < m; ++i) g.edges.push_back({comp(rng), j});
    }
    return g;
}

CurveIncidenceGraph duncehat_curve() { return {1, {3}, {{0, 0}, {0, 0}, {0, 0}}}; }
CurveIncidenceGraph three_cycle() { return {3, {2, 2, 2}, {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {0, 2}}}; }

NCSurfaceDescription relabel_three_planes() {
    // components permuted (A,B,C) -> (C,A,B) in storage order, lines reversed
    auto d = three_planes_description();
    const std::vector<int> comp_new{1, 2, 0}; // old id -> new id
    const std::vector<int> line_new{2, 1, 0};
    NCSurfaceDescription r = d;
    for (int i = 0; i < 3; ++i) r.strata[0][comp_new[i]] = d.strata[0][i];
    for (int i = 0; i < 3; ++i) {
        auto l = d.strata[1][i];
        for (auto& a : l.continuation) a.target = comp_new[a.target];
        r.strata[1][line_new[i]] = l;
    }
    for (auto& a : r.strata[2][0].continuation) a.target = line_new[a.target];
    return r;
}

} // namespace

TEST(DualComplex, Builtins) {
    auto right = dual_complex(duncehat_surface_description());
    EXPECT_TRUE(validate(right).ok());
    EXPECT_TRUE(are_isomorphic(right, functor_p(make_duncehat())));
    EXPECT_FALSE(are_isomorphic(right, make_cyclic_triangle()));

    auto wrong = dual_complex(wrong_case_surface_description());
    EXPECT_TRUE(are_isomorphic(wrong, make_cyclic_triangle()));

    auto planes = dual_complex(three_planes_description());
    EXPECT_TRUE(are_isomorphic(planes, functor_p(make_simplex(2))));
}

TEST(DualComplex, StratumCounts) {
    auto d = duncehat_surface_description();
    EXPECT_EQ(d.count(0), 1u);
    EXPECT_EQ(d.count(1), 1u);
    EXPECT_EQ(d.count(2), 1u);
    EXPECT_EQ(*d.strata[1][0].normal_degrees, (std::array<long, 2>{-2, -1}));
    EXPECT_EQ(*d.strata[1][0].triple_points, 3);
    auto w = wrong_case_surface_description();
    EXPECT_EQ(*w.strata[1][0].triple_points, 3);
}

TEST(DualComplex, BranchSwitchingRefused) {
    auto d = duncehat_surface_description();
    d.strata[1][0].branch_trivial = false;
    try {
        dual_complex(d);
        FAIL();
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("branch switching"), std::string::npos);
    }
}

TEST(DualComplex, InconsistentTripleCountRejected) {
    auto d = duncehat_surface_description();
    d.strata[1][0].triple_points = 2;
    EXPECT_FALSE(validate(d).ok());
    auto e = duncehat_surface_description();
    e.strata[2][0].branches.pop_back();
    EXPECT_FALSE(validate(e).ok());
}

TEST(Kulikov, Degrees) {
    EXPECT_EQ(kulikov_degree(-2, -1, 3), 0);
    EXPECT_EQ(kulikov_degree(7, 7, 3), 17);
    EXPECT_EQ(kulikov_degree(0, 0, 0), 0);
    EXPECT_EQ(nodal_cubic_normal_degree(0), 7);
    auto k = kulikov_degrees(duncehat_surface_description());
    ASSERT_EQ(k.size(), 1u);
    EXPECT_TRUE(k[0].satisfied());
    EXPECT_THROW(kulikov_degrees(wrong_case_surface_description()), InvalidInput);
}

TEST(Kulikov, Additive) {
    std::mt19937 rng(1);
    std::uniform_int_distribution<long> d(-20, 20);
    for (int i = 0; i < 50; ++i) {
        long a = d(rng), b = d(rng), t = d(rng), a2 = d(rng), b2 = d(rng), t2 = d(rng);
        EXPECT_EQ(kulikov_degree(a + a2, b + b2, t + t2), kulikov_degree(a, b, t) + kulikov_degree(a2, b2, t2));
    }
}

TEST(Euler, GenericFiber) {
    EXPECT_EQ(generic_fiber_euler(duncehat_surface_description()), 11);
    EXPECT_EQ(generic_fiber_euler(two_planes_description()), 2);
    NCSurfaceDescription smooth;
    smooth.strata.resize(1);
    smooth.strata[0].push_back(three_planes_description().strata[0][0]);
    EXPECT_EQ(generic_fiber_euler(smooth), 3);
    EXPECT_THROW(generic_fiber_euler(wrong_case_surface_description()), InvalidInput);
    // each plane minus two meeting lines has chi_c = 3 - 3 = 0
    EXPECT_EQ(generic_fiber_euler(three_planes_description()), 0);
}

TEST(Euler, TwoPlanesAgainstCellCount) {
    // CW counts: each plane is point + line + cell, the shared line is
    // point + cell; removing the line leaves two open 2-cells each with a
    // open line of cells (C^2 minus nothing): chi_c = 2 * (3 - 2)
    const long plane = 1 + 1 + 1;
    const long line = 1 + 1;
    EXPECT_EQ(generic_fiber_euler(two_planes_description()), 2 * plane - 2 * line);
}

TEST(Euler, RelabelInvariant) {
    auto r = relabel_three_planes();
    ASSERT_TRUE(validate(r).ok());
    EXPECT_EQ(generic_fiber_euler(r), generic_fiber_euler(three_planes_description()));
    EXPECT_TRUE(are_isomorphic(dual_complex(r), dual_complex(three_planes_description())));
}

TEST(Invariants, Profiles) {
    auto n = numerical_invariants(11, 0, 0);
    EXPECT_EQ(n.h11, 9);
    EXPECT_EQ(n.c2, 11);
    EXPECT_EQ(n.c1_sq, 1);
    auto p2 = numerical_invariants(3, 0, 0);
    EXPECT_EQ(p2.h11, 1);
    EXPECT_EQ(p2.c1_sq, 9);
    EXPECT_THROW(numerical_invariants(4, 0, 1), Unsupported);
    EXPECT_THROW(numerical_invariants(-1, 0, 0), InvalidInput);
}

TEST(Pic, Dimensions) {
    EXPECT_EQ(pic0_structure(duncehat_curve()).dimension, 2);
    EXPECT_EQ(pic0_structure(three_cycle()).dimension, 1);
    CurveIncidenceGraph tree{3, {2, 2}, {{0, 0}, {1, 0}, {1, 1}, {2, 1}}};
    EXPECT_EQ(pic0_structure(tree).dimension, 0);
    EXPECT_EQ(pic0_structure(double_locus_graph(duncehat_surface_description())).dimension, 2);
    EXPECT_EQ(double_locus_graph(duncehat_surface_description()), duncehat_curve());
}

TEST(Pic, DimensionMatchesGraphB1) {
    std::mt19937 rng(17);
    for (int i = 0; i < 40; ++i) {
        auto g = random_graph(rng);
        EXPECT_EQ(pic0_structure(g).dimension, graph_b1_oracle(g));
    }
}

TEST(Pic, InvalidGraph) {
    CurveIncidenceGraph g{1, {3}, {{0, 0}, {0, 0}}};
    EXPECT_THROW(pic0_structure(g), InvalidInput);
}

TEST(Pic, DuncehatClasses) {
    using C = std::complex<double>;
    auto g = duncehat_curve();
    const C c(0.3, 1.7);
    EXPECT_TRUE(pic_is_trivial(pic_normalize<C>(g, {c, c, c})));
    const C a(2.0, -1.0), b(-0.5, 0.25);
    auto x = pic_normalize<C>(g, {1.0, a, b});
    EXPECT_FALSE(pic_is_trivial(x));
    auto y = pic_normalize<C>(g, {1.0, 1.0 / a, 1.0 / b});
    EXPECT_TRUE(pic_is_trivial(pic_mul(g, x, y)));
    auto z = pic_normalize<C>(g, {C(2, 0), 2.0 * a, 2.0 * b});
    EXPECT_TRUE(pic_equal(x, z));
    EXPECT_THROW(pic_normalize<C>(g, {1.0, 0.0, 1.0}), InvalidInput);
}

TEST(Pic, GroupLawRandom) {
    using C = std::complex<double>;
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 20; ++i) {
        auto g = random_graph(rng);
        auto draw = [&] {
            std::vector<C> v;
            for (std::size_t e = 0; e < g.edges.size(); ++e) v.push_back(std::polar(std::exp(u(rng)), u(rng)));
            return pic_normalize<C>(g, v);
        };
        auto a = draw(), b = draw(), c = draw();
        EXPECT_TRUE(pic_equal(pic_mul(g, a, b), pic_mul(g, b, a)));
        EXPECT_TRUE(pic_equal(pic_mul(g, pic_mul(g, a, b), c), pic_mul(g, a, pic_mul(g, b, c))));
        EXPECT_TRUE(pic_is_trivial(pic_mul(g, a, pic_inverse(g, a))));
        std::vector<C> ones(g.edges.size(), 1.0);
        EXPECT_TRUE(pic_equal(pic_mul(g, a, pic_normalize<C>(g, ones)), a));
    }
}

TEST(Pic, ThreeCycleExactAgainstGaugeSearch) {
    auto g = three_cycle();
    std::vector<Rational> raw{2, 1, 1, 1, 1, 1};
    auto cls = pic_normalize<Rational>(g, raw);
    EXPECT_FALSE(pic_is_trivial(cls));
    int non_unit = 0;
    for (const auto& v : cls.values)
        if (v != 1) {
            ++non_unit;
            EXPECT_TRUE(v == 2 || v == Rational(1, 2));
        }
    EXPECT_EQ(non_unit, 1);

    // brute force over gauges with scalings in {±1/4..±4}: no choice turns
    // the data into all ones, while (2,2,1,1,1,1) (a coboundary) is reachable
    std::vector<Rational> choices;
    for (int p = -2; p <= 2; ++p) {
        Rational x = p >= 0 ? Rational(1 << p) : Rational(1, 1 << -p);
        choices.push_back(x);
        choices.push_back(-x);
    }
    auto reachable = [&](const std::vector<Rational>& v) {
        const int nodes = 6;
        std::vector<std::size_t> idx(nodes, 0);
        for (;;) {
            bool all_one = true;
            for (std::size_t e = 0; e < g.edges.size() && all_one; ++e)
                all_one = v[e] * choices[idx[g.edges[e].first]] * choices[idx[3 + g.edges[e].second]] == 1;
            if (all_one) return true;
            int k = 0;
            while (k < nodes && ++idx[k] == choices.size()) idx[k++] = 0;
            if (k == nodes) return false;
        }
    };
    EXPECT_FALSE(reachable(raw));
    std::vector<Rational> coboundary{2, 2, 1, 1, 1, 1};
    EXPECT_TRUE(reachable(coboundary));
    EXPECT_TRUE(pic_is_trivial(pic_normalize<Rational>(g, coboundary)));
}

TEST(Pi1, Verdicts) {
    auto right = pi1_vanishing_verdict(duncehat_surface_description(), {true});
    EXPECT_TRUE(right.vanishes);
    auto unflagged = pi1_vanishing_verdict(duncehat_surface_description(), {false});
    EXPECT_FALSE(unflagged.vanishes);
    ASSERT_FALSE(unflagged.reasons.empty());
    EXPECT_NE(unflagged.reasons.front().find("component"), std::string::npos);
    auto wrong = pi1_vanishing_verdict(wrong_case_surface_description(), {true});
    EXPECT_FALSE(wrong.vanishes);
    EXPECT_EQ(wrong.abelianization.torsion, (std::vector<BigInt>{3}));
}
