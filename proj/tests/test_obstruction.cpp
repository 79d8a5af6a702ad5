#include <gtest/gtest.h>

#include "dunce/obstruction.hpp"

using namespace dunce;

namespace {

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

Mat3 unimodular_motion() {
    Mat3 m;
    m << 0.8, 0.6, 0.1, -0.6, 0.8, -0.2, 0.0, 0.0, 1.0;
    return m;
}

} // namespace

TEST(MainRows, SAtFirstBranchIsOneEighth) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Construct c = random_construct(seed).construct;
        EXPECT_NEAR(std::abs(eval_main_rows(c).s_at_p1 - 0.125), 0, 1e-12);
    }
}

TEST(MainRows, DerivativeOfSAgreesWithFiniteDifferences) {
    const Construct c = random_construct(4).construct;
    const MainRows r = eval_main_rows(c);
    const cplx n = c.n_p;
    EXPECT_LT(rel_err(r.ds_dv[0], 1.0 / (16.0 * n)), 1e-12);
    EXPECT_EQ(r.ds_dv[1], 0.0);
    EXPECT_LT(rel_err(r.ds_dv[2], -(n - 1.0) * (n - 1.0) / n), 1e-12);
    // oracle: move along v_P in the parameter and differentiate s(tau(t))
    for (int i : {0, 2}) {
        const cplx t = i == 0 ? c.p1() : c.p3();
        const cplx tdot = field_value(c.tau_p, t);
        auto s_at = [&](cplx e) { return s_function(n, c.tau_p(t + e * tdot)); };
        const double h = 1e-4;
        const cplx d1 = (s_at(h) - s_at(-h)) / (2 * h), d2 = (s_at(h / 2) - s_at(-h / 2)) / h;
        EXPECT_LT(rel_err((4.0 * d2 - d1) / 3.0, r.ds_dv[i]), 1e-9);
    }
}

TEST(MainRows, SecondRowVanishes) {
    const Construct c = random_construct(5).construct;
    EXPECT_EQ(eval_main_rows(c).rows[1], 0.0);
    EXPECT_NE(eval_main_rows(c).rows[0], 0.0);
    EXPECT_NE(eval_main_rows(c).rows[2], 0.0);
}

TEST(MainRows, LambdasDependOnlyOnN) {
    const auto family = seeded_family(6, 4);
    const MainRows r0 = eval_main_rows(family[0]);
    for (const auto& c : family) {
        const MainRows r = eval_main_rows(c);
        for (int i = 0; i < 3; ++i) {
            EXPECT_LT(rel_err(r.lambda[i], r0.lambda[i]), 1e-8);
            if (r0.ds_dv[i] != 0.0) EXPECT_LT(rel_err(r.ds_dv[i], r0.ds_dv[i]), 1e-8);
        }
    }
    const MainRows rt = eval_main_rows(transport(family[0], unimodular_motion()));
    for (int i = 0; i < 3; ++i) EXPECT_LT(rel_err(rt.lambda[i], r0.lambda[i]), 1e-9);
}

TEST(ClosedForm, SbAtBranches) {
    const Construct c = random_construct(8).construct;
    const SBGValues v = sbg_values(c);
    EXPECT_LT(rel_err(v.s_b[0], 1.0 / c.tau_b()), 1e-12);
    EXPECT_LT(rel_err(v.s_b[1], 1.0), 1e-12);
    EXPECT_LT(rel_err(v.s_b[2], (c.n_p - 1.0) / (c.n_p - c.tau_b())), 1e-12);
    EXPECT_LT(rel_err(v.g_p1, -c.n_p), 1e-12);
    // the printed a and b factors evaluate f on its own zero set
    EXPECT_LT(std::abs(v.a_printed), 1e-9);
    EXPECT_LT(std::abs(v.b_printed), 1e-9);
}

TEST(ClosedForm, FamilyRatiosFollowFValues) {
    const auto family = seeded_family(9, 4);
    const SBGValues v0 = sbg_values(family[0]);
    const JPoint j0 = closed_form_data(family[0]);
    for (const auto& c : family) {
        const SBGValues v = sbg_values(c);
        // unimodular shears preserve the pairings
        EXPECT_LT(rel_err(v.omega_p1p2, v0.omega_p1p2), 1e-8);
        EXPECT_LT(rel_err(v.omega_q1q2, v0.omega_q1q2), 1e-8);
        const JPoint j = closed_form_data(c);
        // A2/A1 scales with f_P(q_N), A3/A1 with f_Q(p_N)
        EXPECT_LT(rel_err(j.a / j0.a, v.f_P_at_qN / v0.f_P_at_qN), 1e-8);
        EXPECT_LT(rel_err(j.b / j0.b, v.f_Q_at_pN / v0.f_Q_at_pN), 1e-8);
    }
}

TEST(ClosedForm, ResidueNormalizationIsIdempotent) {
    const Construct c = random_construct(10).construct;
    const CubicForm again = normalize_residue(c.P.f.scaled(cplx(3.0, -2.0)), c.P.coeffs, c.P.u1);
    for (int k = 0; k < 10; ++k) EXPECT_NEAR(std::abs(again.c[k] - c.P.f.c[k]), 0, 1e-12 * c.P.f.norm());
}

TEST(ClosedForm, AgreesWithPicNormalization) {
    const Construct c = random_construct(11).construct;
    const GluingTriple t = closed_form_triple(c);
    const JPoint j = normalize(t);
    const NumericPicClass k = as_pic_class(t);
    ASSERT_EQ(k.values.size(), 3u);
    EXPECT_LT(std::abs(k.values[0] - 1.0), 1e-14);
    EXPECT_LT(rel_err(k.values[1], j.a), 1e-14);
    EXPECT_LT(rel_err(k.values[2], j.b), 1e-14);
}

TEST(DirectPipeline, ResidualIsTheThreeBranches) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Construct c = random_construct(seed).construct;
        const DirectPipelineReport r = direct_pipeline(c);
        EXPECT_EQ(r.total.degree(), 3);
        EXPECT_EQ(r.residual.terms().size(), 3u);
        for (cplx p : {c.p1(), c.p2(), c.p3()}) EXPECT_EQ(r.residual.multiplicity_at(P1::finite(p)), 1);
        EXPECT_EQ(r.h.degree(), 0);
        // beta_P and beta_Q have degrees 2 and 1 on the blown-up surface
        EXPECT_EQ(r.beta_p.degree(), 2);
        EXPECT_EQ(r.beta_q_pulled.degree(), 1);
        EXPECT_EQ(r.correction.degree(), 0);
    }
}

TEST(DirectPipeline, DisplayedSFailsTheSelfCheck) {
    // s = n^2 (tau - n) / (tau - 2n)^3 vanishes twice at p2 and not at p1
    const Construct c = random_construct(12).construct;
    try {
        direct_pipeline(c, true);
        FAIL() << "residual check passed with the displayed s";
    } catch (const PipelineFailure& e) {
        EXPECT_NE(std::string(e.what()).find("2["), std::string::npos);
    }
}

TEST(DirectPipeline, CorrectedDivisorDependsOnlyOnN) {
    const auto family = seeded_family(13, 4);
    const auto off = [](const Construct& c) {
        const auto r = direct_pipeline(c);
        Divisor d;
        for (const auto& t : r.total.terms()) {
            bool special = false;
            for (cplx p : {c.p1(), c.p2(), c.p3()}) special = special || chordal_distance(t.point, P1::finite(p)) < 1e-7;
            if (!special) d.add(t.point, t.multiplicity);
        }
        return d;
    };
    const Divisor d0 = off(family[0]);
    EXPECT_FALSE(d0.empty());
    for (const auto& c : family) {
        const Divisor d = off(c);
        ASSERT_EQ(d.terms().size(), d0.terms().size());
        for (const auto& t : d.terms()) EXPECT_EQ(d0.multiplicity_at(t.point, 1e-7), t.multiplicity);
    }
}

TEST(Consistency, SeededFamilies) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto r = consistency_check(seeded_family(seed, 5));
        EXPECT_LE(r.deviation, 1e-6) << "seed " << seed;
    }
}

TEST(Consistency, SingletonFamily) { EXPECT_EQ(consistency_check(seeded_family(4, 1)).deviation, 0.0); }

TEST(Consistency, MutationIsDetected) {
    const auto r = consistency_check(seeded_family(5, 5), ClosedFormMutation::drop_fq_in_a2);
    EXPECT_GT(r.deviation, 1e-3);
}

TEST(Consistency, RejectsDriftingFamily) {
    std::vector<Construct> f{random_construct(1).construct, random_construct(2).construct};
    EXPECT_THROW(consistency_check(f), InvalidInput);
}

TEST(Jacobian, FullRankOnRandomConstructs) {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const auto r = jacobian_rank(random_construct(seed).construct);
        EXPECT_EQ(r.rank, 4) << "seed " << seed;
        EXPECT_FALSE(r.unstable);
    }
}

TEST(Jacobian, InvariantUnderTransport) {
    const Construct c = random_construct(16).construct;
    EXPECT_EQ(jacobian_rank(c).rank, jacobian_rank(transport(c, unimodular_motion())).rank);
}

TEST(Jacobian, DuplicatedDirections) {
    JacobianRankOptions opt;
    opt.directions = {Side::Q, Side::P, Side::Q};
    EXPECT_EQ(jacobian_rank(random_construct(17).construct, opt).rank, 4);
}

TEST(Jacobian, DegeneratesTowardCollinearity) {
    const Construct c = random_construct(41).construct;
    GuardOptions relaxed;
    relaxed.allow_collinear = true;
    JacobianRankOptions opt;
    opt.guard = relaxed;
    const auto generic = jacobian_rank(toward_collinear(c, 0.1, relaxed), opt);
    const auto near = jacobian_rank(toward_collinear(c, 1e-5, relaxed), opt);
    const auto flat = jacobian_rank(toward_collinear(c, 0.0, relaxed), opt);
    const double smin_generic = generic.jacobian.singular_values.minCoeff();
    EXPECT_LT(near.jacobian.singular_values.minCoeff(), 1e-3 * smin_generic);
    EXPECT_TRUE(flat.rank < 4 || flat.unstable || flat.jacobian.singular_values.maxCoeff() < 1e-6);
}

TEST(Scan, ReachesTargets) {
    const auto rep = surjectivity_scan(7, random_targets(7, 5));
    EXPECT_EQ(rep.successes(), 5);
    for (const auto& r : rep.results) EXPECT_LE(r.residual, 1e-8);
}

TEST(Scan, IdentityTargetNeedsNoIterations) {
    const auto r = newton_to_target(random_construct(7).construct, {1.0, 1.0});
    EXPECT_TRUE(r.reached);
    EXPECT_EQ(r.iterations, 0);
}

TEST(Scan, ExtremeTargetIsReportedNotThrown) {
    ScanTargetResult r;
    EXPECT_NO_THROW(r = newton_to_target(random_construct(7).construct, {std::exp(cplx(10.0, 0.0)), 1.0}));
    if (!r.reached) EXPECT_FALSE(r.failure.empty());
}
