#include <gtest/gtest.h>

#include <random>

#include "dunce/numerics.hpp"

using namespace dunce;

namespace {

// Greedy nearest matching; returns the worst distance.
double match_error(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0;
    for (auto z : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](cplx u, cplx v) { return std::abs(u - z) < std::abs(v - z); });
        worst = std::max(worst, std::abs(*it - z));
        b.erase(it);
    }
    return worst;
}

cplx random_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2, 2);
    return {u(rng), u(rng)};
}

} // namespace

TEST(Roots, CubeRootsOfUnity) {
    auto r = poly_roots(Poly{-1.0, 0.0, 0.0, 1.0});
    ASSERT_EQ(r.size(), 3u);
    std::vector<cplx> want;
    for (int k = 0; k < 3; ++k) want.push_back(std::polar(1.0, 2 * std::numbers::pi * k / 3));
    EXPECT_LT(match_error(r, want), 1e-12);
}

TEST(Roots, DoubleRootClusters) {
    auto p = Poly::from_roots({2.0, 2.0, -1.0});
    auto r = poly_roots(p);
    auto c = cluster_roots(p, r);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(std::abs(c[0].z - cplx(-1.0)), 0.0, 1e-10);
    EXPECT_EQ(c[0].multiplicity, 1);
    EXPECT_NEAR(std::abs(c[1].z - cplx(2.0)), 0.0, 1e-7);
    EXPECT_EQ(c[1].multiplicity, 2);
}

TEST(Roots, TripleRootClusters) {
    auto p = Poly::from_roots({4.0, 4.0, 4.0});
    auto c = cluster_roots(p, poly_roots(p));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].multiplicity, 3);
    EXPECT_NEAR(std::abs(c[0].z - 4.0), 0.0, 1e-8);
}

TEST(Roots, CloseDistinctRootsStaySeparate) {
    auto p = Poly::from_roots({1.0, 1.0001, 3.0});
    auto c = cluster_roots(p, poly_roots(p));
    EXPECT_EQ(c.size(), 3u);
}

TEST(Roots, RandomDegreeNineByMultiplication) {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> want;
        for (int i = 0; i < 9; ++i) want.push_back(random_point(rng));
        auto p = Poly::from_roots(want, random_point(rng) + 3.0);
        EXPECT_LT(match_error(poly_roots(p), want), 1e-10);
    }
}

TEST(Roots, ProductIsUnion) {
    std::mt19937 rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> ra, rb;
        for (int i = 0; i < 4; ++i) ra.push_back(random_point(rng));
        for (int i = 0; i < 3; ++i) rb.push_back(random_point(rng));
        auto p = Poly::from_roots(ra, random_point(rng) + 3.0), q = Poly::from_roots(rb, random_point(rng) + 3.0);
        auto all = poly_roots(p);
        auto b = poly_roots(q);
        all.insert(all.end(), b.begin(), b.end());
        EXPECT_LT(match_error(poly_roots(p * q), all), 1e-9);
    }
}

TEST(Roots, ZeroRootsAndErrors) {
    auto r = poly_roots(Poly{0.0, 0.0, 1.0, 1.0});
    EXPECT_EQ(std::count(r.begin(), r.end(), cplx(0.0)), 2);
    EXPECT_THROW(poly_roots(Poly{3.0}), InvalidInput);
}

TEST(Mobius, FromTriple) {
    auto id = mobius_from_triple(P1::finite(0.0), P1::infinity(), P1::finite(1.0));
    for (cplx z : {cplx(0.3, 0.2), cplx(-2.0, 1.0), cplx(5.0)}) EXPECT_LT(std::abs(id(z).value() - z), 1e-14);
    auto m = mobius_from_triple(1.0, 2.0, 3.0);
    EXPECT_LT(std::abs(m(1.0).value()), 1e-15);
    EXPECT_TRUE(m(2.0).is_infinite());
    EXPECT_LT(std::abs(m(3.0).value() - 1.0), 1e-14);
    EXPECT_THROW(mobius_from_triple(1.0, 1.0, 3.0), NumericRejection);
}

TEST(Mobius, InverseAndGroupLaws) {
    std::mt19937 rng(303);
    auto f = mobius_from_triple(random_point(rng), random_point(rng), random_point(rng));
    auto g = mobius_from_triple(random_point(rng), random_point(rng), random_point(rng));
    auto h = mobius_from_triple(random_point(rng), random_point(rng), random_point(rng));
    for (int i = 0; i < 100; ++i) {
        cplx z = random_point(rng);
        EXPECT_LT(std::abs(f.inverse()(f(z)).value() - z), 1e-12);
        EXPECT_LT(std::abs((f * g)(z).value() - f(g(z)).value()) / (1 + std::abs(f(g(z)).value())), 1e-12);
        EXPECT_LT(std::abs(((f * g) * h)(z).value() - (f * (g * h))(z).value()) /
                      (1 + std::abs((f * (g * h))(z).value())),
                  1e-12);
    }
}

TEST(Mobius, DerivativeMatchesFiniteDifference) {
    auto m = mobius_from_triple(cplx(0.5, 1), cplx(-1, 0.2), cplx(2, -1));
    cplx t(0.3, -0.4), h(1e-6, 0);
    cplx fd = (m(t + h).value() - m(t - h).value()) / (2.0 * h);
    EXPECT_LT(std::abs(fd - m.derivative(t)), 1e-7 * std::abs(fd));
}

TEST(Divisor, OfS) {
    // s = n^2 (t - n) / (t - 2n)^3 with n = 2
    const cplx n = 2.0;
    auto num = Poly{-n, 1.0} * (n * n);
    auto den = Poly::from_roots({2.0 * n, 2.0 * n, 2.0 * n});
    auto d = rational_divisor(num, den);
    EXPECT_EQ(d.degree(), 0);
    EXPECT_EQ(d.multiplicity_at(P1::finite(2.0)), 1);
    EXPECT_EQ(d.multiplicity_at(P1::infinity()), 2);
    EXPECT_EQ(d.multiplicity_at(P1::finite(4.0)), -3);
}

TEST(Divisor, OfG) {
    // g = (t - n) / (t - 1)^2 in tau coordinates: zeros at n and infinity
    const cplx n = 2.0;
    auto d = rational_divisor(Poly{-n, 1.0}, Poly::from_roots({1.0, 1.0}));
    EXPECT_EQ(d.multiplicity_at(P1::infinity()), 1);
    EXPECT_EQ(d.multiplicity_at(P1::finite(n)), 1);
    EXPECT_EQ(d.multiplicity_at(P1::finite(1.0)), -2);
    EXPECT_EQ(d.degree(), 0);
}

TEST(Divisor, ConstantAndRandomDegree) {
    EXPECT_TRUE(rational_divisor(Poly{3.0}, Poly{2.0}).empty());
    std::mt19937 rng(404);
    for (int i = 0; i < 20; ++i) {
        std::vector<cplx> a, b;
        for (int k = 0; k < 1 + i % 5; ++k) a.push_back(random_point(rng));
        for (int k = 0; k < 1 + (i * 7) % 4; ++k) b.push_back(random_point(rng));
        EXPECT_EQ(rational_divisor(Poly::from_roots(a), Poly::from_roots(b)).degree(), 0);
    }
}

TEST(Jacobian, Examples) {
    auto id = finite_diff_jacobian([](const Eigen::VectorXd& x) { return x; }, Eigen::Vector2d(0.3, -1.0));
    EXPECT_EQ(id.rank, 2);
    EXPECT_NEAR(id.singular_values[0], 1.0, 1e-9);
    EXPECT_NEAR(id.singular_values[1], 1.0, 1e-9);

    auto sq = finite_diff_jacobian(
        [](const Eigen::VectorXd& x) { return Eigen::Vector2d(x[0] * x[0], x[0] * x[1]); }, Eigen::Vector2d(1, 1));
    Eigen::Matrix2d want;
    want << 2, 0, 1, 1;
    EXPECT_LT((sq.jacobian - want).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(sq.rank, 2);

    auto flat = finite_diff_jacobian([](const Eigen::VectorXd& x) { return Eigen::Vector2d(x[0], x[0]); },
                                     Eigen::Vector2d(0.5, 0.5));
    EXPECT_EQ(flat.rank, 1);

    EXPECT_THROW(finite_diff_jacobian([](const Eigen::VectorXd& x) { return Eigen::Vector2d(std::log(-1 - x[0]), 0); },
                                      Eigen::Vector2d(0.5, 0.5)),
                 NumericRejection);
}

TEST(Jacobian, RankInvariantUnderOrthogonalRecombination) {
    auto f = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd y(3);
        y << std::sin(x[0]) + x[1], x[0] * x[1], x[0] + x[1] + x[2] * x[2];
        return y;
    };
    Eigen::Matrix3d q = Eigen::Quaterniond(0.3, -0.5, 0.7, 0.1).normalized().toRotationMatrix();
    auto g = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return q * f(x); };
    Eigen::Vector3d x(0.2, 0.4, 0.0); // third column vanishes here: rank 2
    auto a = finite_diff_jacobian(f, x), b = finite_diff_jacobian(g, x);
    EXPECT_EQ(a.rank, 2);
    EXPECT_EQ(a.rank, b.rank);
    EXPECT_LT((a.singular_values - b.singular_values).cwiseAbs().maxCoeff(), 1e-8);
}
