#pragma once

// The obstruction map on constructs: gluing data of T^1 on the double
// curve, by the closed form and by an independent divisor pipeline, plus
// the family consistency test, the Jacobian rank and Newton scans toward
// multiplicative targets.

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "dunce/cubics.hpp"
#include "dunce/pic.hpp"

namespace dunce {

/// A hard failure of the divisor bookkeeping; carries the offending divisor.
class PipelineFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Provenance { closed_form, direct_pipeline, main_rows };
inline const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::closed_form: return "closed-form";
    case Provenance::direct_pipeline: return "direct-pipeline";
    case Provenance::main_rows: return "main-rows";
    }
    return "?";
}

struct GluingTriple {
    std::array<cplx, 3> g{};
    Provenance provenance = Provenance::closed_form;
    cplx n_p, n_q;
};

/// (G2/G1, G3/G1).
struct JPoint {
    cplx a, b;
};

inline JPoint normalize(const GluingTriple& t) {
    for (auto v : t.g)
        if (!(std::abs(v) > 0) || !std::isfinite(std::abs(v)))
            throw NumericRejection("gluing", "a gluing value is zero or non-finite");
    return {t.g[1] / t.g[0], t.g[2] / t.g[0]};
}

inline std::string to_string(const Divisor& d) {
    std::ostringstream os;
    os.precision(10);
    bool first = true;
    for (const auto& t : d.terms()) {
        os << (first ? "" : " + ") << t.multiplicity << "[";
        if (t.point.is_infinite())
            os << "inf";
        else
            os << t.point.value();
        os << "]";
        first = false;
    }
    return first ? "0" : os.str();
}

// ---------------------------------------------------------------------------
// Vector fields and pairings

/// Components of v = (tau - 1)^2 d/dtau in the parameter t, where
/// tau = (a t + b) / (c t + d): a quadratic with a double root at tau = 1.
inline Poly field_in_parameter(const Mobius& tau) {
    const Poly lin({tau.b() - tau.d(), tau.a() - tau.c()});
    return lin * lin * (1.0 / tau.determinant());
}

inline cplx field_value(const Mobius& tau, cplx t) { return field_in_parameter(tau)(t); }

/// Affine-plane tangent vectors of v_P, v_Q and of phi_* v_P.
inline Vec2 v_P(const Construct& c, cplx t) { return field_value(c.tau_p, t) * c.P.velocity(t); }
inline Vec2 v_Q(const Construct& c, cplx s) { return field_value(c.tau_q, s) * c.Q.velocity(s); }
inline Vec2 phi_push_v_P(const Construct& c, cplx t) {
    return c.phi.derivative(t) * field_value(c.tau_p, t) * c.Q.velocity(c.phi_at(t));
}

inline cplx omega(const Vec2& u, const Vec2& w) { return u[0] * w[1] - u[1] * w[0]; }

// ---------------------------------------------------------------------------
// s, s_b, g

/// s = n^2 (tau - n) / (tau - 2n)^3.
inline cplx s_function(cplx n, const P1& tau) {
    if (tau.is_infinite()) return 0.0;
    const cplx t = tau.value();
    return n * n * (t - n) / std::pow(t - 2.0 * n, 3);
}

/// Derivative of s along v_P = (tau - 1)^2 d/dtau.
inline cplx ds_dv(cplx n, const P1& tau) {
    if (tau.is_infinite()) return 0.0;
    const cplx t = tau.value();
    return (t - 1.0) * (t - 1.0) * n * n * (n - 2.0 * t) / std::pow(t - 2.0 * n, 4);
}

/// s_b = (tau - 1) / (tau - tau(b)).
inline cplx s_b_function(cplx tau_b, const P1& tau) {
    if (tau.is_infinite()) return 1.0;
    return (tau.value() - 1.0) / (tau.value() - tau_b);
}

/// g = (tau - n) / (tau - 1)^2.
inline cplx g_function(cplx n, const P1& tau) {
    if (tau.is_infinite()) return 0.0;
    return (tau.value() - n) / std::pow(tau.value() - 1.0, 2);
}

// ---------------------------------------------------------------------------
// Main rows

struct MainRows {
    std::array<cplx, 3> lambda{};   // lambda_1, lambda_2, lambda_3
    std::array<cplx, 3> ds_dv{};    // at p1, p2, p3
    std::array<cplx, 3> rows{};
    /// Omega(vP1, vP2), Omega(vQ2, vQ1), Omega(vQ3, vP3), Omega(vP3, vQ3), Omega(vQ1, vQ2)
    std::array<cplx, 5> pairings{};
    cplx s_at_p1 = 0.0;
};

/// The three rows exactly as displayed, with the derivative of s along v_P.
/// s has a double zero at p2, so the second row vanishes identically.
inline MainRows eval_main_rows(const Construct& c) {
    MainRows r;
    const cplx p1 = c.p1(), p2 = c.p2(), p3 = c.p3();
    const cplx q1 = c.q1(), q2 = c.q2(), q3 = c.q3();
    auto lam = [&](cplx t, cplx s) {
        return field_value(c.tau_p, t) * c.phi.derivative(t) / field_value(c.tau_q, s);
    };
    r.lambda = {lam(p3, q1), lam(p1, q2), lam(p2, q3)};
    const cplx n = c.n_p;
    r.ds_dv = {ds_dv(n, c.tau_p(p1)), ds_dv(n, c.tau_p(p2)), ds_dv(n, c.tau_p(p3))};
    r.s_at_p1 = s_function(n, c.tau_p(p1));
    const Vec2 vp1 = v_P(c, p1), vp2 = v_P(c, p2), vp3 = v_P(c, p3);
    const Vec2 vq1 = v_Q(c, q1), vq2 = v_Q(c, q2), vq3 = v_Q(c, q3);
    r.pairings = {omega(vp1, vp2), omega(vq2, vq1), omega(vq3, vp3), omega(vp3, vq3), omega(vq1, vq2)};
    for (auto p : r.pairings)
        if (std::abs(p) < 1e-14) throw NumericRejection("tangency", "a pairing of tangent vectors vanishes");
    r.rows[0] = r.lambda[0] * r.ds_dv[0] * r.pairings[0] * r.pairings[1];
    r.rows[1] = r.ds_dv[1] * (-r.pairings[0]) * r.pairings[2];
    r.rows[2] = r.lambda[1] * r.lambda[2] * r.ds_dv[2] * r.pairings[3] * r.pairings[4];
    return r;
}

// ---------------------------------------------------------------------------
// Closed form

struct SBGValues {
    std::array<cplx, 3> s_b{};
    cplx g_p1 = 0.0;
    /// The printed factors 1/Omega_Q(vQ1, vQ2) and 1/Omega_P(vP1, vP2) with
    /// Omega_X = Omega / f_X: these evaluate f on its own zero set.
    cplx a_printed = 0.0, b_printed = 0.0;
    cplx f_P_at_qN = 0.0, f_Q_at_pN = 0.0;
    cplx omega_p1p2 = 0.0, omega_q1q2 = 0.0, omega_q3p3 = 0.0;
    std::array<cplx, 3> A{};
};

enum class ClosedFormMutation { none, drop_fq_in_a2 };

inline SBGValues sbg_values(const Construct& c, ClosedFormMutation mutation = ClosedFormMutation::none) {
    SBGValues v;
    const cplx n = c.n_p, tb = c.tau_b();
    v.s_b = {s_b_function(tb, c.tau_p(c.p1())), s_b_function(tb, c.tau_p(c.p2())), s_b_function(tb, c.tau_p(c.p3()))};
    v.g_p1 = g_function(n, c.tau_p(c.p1()));
    const Vec2 vp1 = v_P(c, c.p1()), vp2 = v_P(c, c.p2()), vp3 = v_P(c, c.p3());
    const Vec2 vq1 = v_Q(c, c.q1()), vq2 = v_Q(c, c.q2()), vq3 = v_Q(c, c.q3());
    v.omega_p1p2 = omega(vp1, vp2);
    v.omega_q1q2 = omega(vq1, vq2);
    v.omega_q3p3 = omega(vq3, vp3);
    v.f_P_at_qN = c.P.f_affine(c.q_node);
    v.f_Q_at_pN = c.Q.f_affine(c.p_node);
    v.a_printed = c.Q.f_affine(c.q_node) / v.omega_q1q2;
    v.b_printed = c.P.f_affine(c.p_node) / v.omega_p1p2;
    const cplx fq = mutation == ClosedFormMutation::drop_fq_in_a2 ? cplx(1.0) : v.f_Q_at_pN;
    v.A[0] = v.omega_p1p2 * (-v.omega_q1q2) / (v.f_Q_at_pN * v.f_P_at_qN);
    v.A[1] = -v.omega_p1p2 / fq;
    v.A[2] = v.omega_q1q2 / v.f_P_at_qN;
    return v;
}

inline GluingTriple closed_form_triple(const Construct& c, ClosedFormMutation mutation = ClosedFormMutation::none) {
    const SBGValues v = sbg_values(c, mutation);
    GluingTriple t;
    t.provenance = Provenance::closed_form;
    t.n_p = c.n_p;
    t.n_q = c.n_q;
    for (int i = 0; i < 3; ++i) t.g[i] = v.s_b[i] * v.A[i];
    return t;
}

inline JPoint closed_form_data(const Construct& c, ClosedFormMutation mutation = ClosedFormMutation::none) {
    return normalize(closed_form_triple(c, mutation));
}

// ---------------------------------------------------------------------------
// Direct pipeline

struct DirectPipelineReport {
    /// Divisor of the corrected section before h, on the P-line.
    Divisor total;
    /// Divisor of the scalar correction (s_+ s_b g / f_Q|_P / phi^* f_P|_Q).
    Divisor correction;
    Divisor beta_p, beta_q_pulled;
    Divisor h;
    Divisor residual;
    /// Divisor of the coefficient F of beta_P (x) beta_Q in the final section:
    /// [p1] + [p2] + [p3] - D(beta_P) - phi^* D(beta_Q).
    Divisor coefficient;
    GluingTriple triple;
    JPoint point;
};

namespace detail {

inline Divisor map_divisor(const Divisor& d, const Mobius& m, double tol = 1e-7) {
    Divisor out;
    for (const auto& t : d.terms()) out.add(m(t.point), t.multiplicity, tol);
    return out;
}

inline Poly linear(cplx constant, cplx slope) { return Poly({constant, slope}); }

inline Poly power(const Poly& p, int k) {
    Poly out = Poly::constant(1.0);
    for (int i = 0; i < k; ++i) out = out * p;
    return out;
}

/// Divisor of the conormal section beta = i_v Omega of a cubic, in its own
/// parameter: (v, alpha) dt-scalar, the df-frame (zeros at both node
/// branches, poles of order 3 over the line at infinity), and the blow-ups.
inline Divisor beta_divisor(const NodalCubic& k, const Mobius& tau, const std::vector<cplx>& blown_up,
                            const Tolerances& tol) {
    Divisor d;
    // <alpha, v> = tdot (u1 - u2) / ((t - u1)(t - u2))
    const Poly num = field_in_parameter(tau) * (k.u1 - k.u2);
    const Poly den = linear(-k.u1, 1.0) * linear(-k.u2, 1.0);
    d.add(rational_divisor(num, den, tol));
    // df-frame
    d.add(P1::finite(k.u1), 1);
    d.add(P1::finite(k.u2), 1);
    for (cplx z : poly_roots(k.polys()[2], tol)) d.add(P1::finite(z), -3);
    for (cplx z : blown_up) d.add(P1::finite(z), 1);
    return d;
}

} // namespace detail

/// Computes the divisor of the corrected section on the P-line, cancels
/// every point off {p1, p2, p3} with h, asserts the residual is exactly
/// [p1] + [p2] + [p3], and evaluates the derivative of the final section
/// along v_P at each p_i, paired with the tangent vectors of the other
/// branches.
///
/// The positive part of s is taken as [p1] + [p2] + [p3]: the scalar used is
/// s_+ = n tau (tau - n) / (tau - 2n)^3, which has exactly that divisor
/// together with the pole 3[tau = 2n]. The displayed s has a double zero at
/// p2 and none at p1 (see `s_function`).
inline DirectPipelineReport direct_pipeline(const Construct& c, bool use_displayed_s = false,
                                            const Tolerances& tol = {}) {
    DirectPipelineReport r;
    const cplx n = c.n_p, tb = c.tau_b();
    const Poly A = detail::linear(c.tau_p.b(), c.tau_p.a());
    const Poly B = detail::linear(c.tau_p.d(), c.tau_p.c());
    const Poly A_n = A - B * n, A_2n = A - B * (2.0 * n), A_1 = A - B;

    // scalar correction factors, each through rational_divisor
    Divisor& corr = r.correction;
    if (use_displayed_s)
        corr.add(rational_divisor(A_n * B * B, detail::power(A_2n, 3), tol));
    else
        corr.add(rational_divisor(A * A_n * B, detail::power(A_2n, 3), tol));
    corr.add(rational_divisor(A_1, A - B * tb, tol));
    corr.add(rational_divisor(A_n * B, A_1 * A_1, tol));
    // 1 / f_Q|_P = Z_P^3 / F_Q(gamma_P)
    corr.add(rational_divisor(c.P.polys()[2], Poly::constant(1.0), tol), 3);
    corr.add(rational_divisor(Poly::constant(1.0), c.Q.f.compose(c.P.polys()), tol));
    // phi^*(1 / f_P|_Q), with gamma_Q(phi(t)) in homogeneous form
    {
        const Poly Ap = detail::linear(c.phi.b(), c.phi.a()), Bp = detail::linear(c.phi.d(), c.phi.c());
        std::array<Poly, 3> gq;
        for (int i = 0; i < 3; ++i) {
            gq[i] = Poly::constant(0.0);
            for (int k = 0; k < 4; ++k)
                gq[i] = gq[i] + detail::power(Ap, k) * detail::power(Bp, 3 - k) * c.Q.coeffs(i, k);
        }
        corr.add(rational_divisor(gq[2], Poly::constant(1.0), tol), 3);
        corr.add(rational_divisor(Poly::constant(1.0), c.P.f.compose(gq), tol));
    }

    // beta_P: blown up at b and the intersections other than n
    std::vector<cplx> up_p{c.choices.b}, up_q;
    for (int k = 0; k < 9; ++k) {
        if (k == c.n_index) continue;
        up_p.push_back(c.intersections[k].t_p);
        up_q.push_back(c.intersections[k].s_q);
    }
    r.beta_p = detail::beta_divisor(c.P, c.tau_p, up_p, tol);
    r.beta_q_pulled = detail::map_divisor(detail::beta_divisor(c.Q, c.tau_q, up_q, tol), c.phi.inverse());

    r.total.add(corr);
    r.total.add(r.beta_p);
    r.total.add(r.beta_q_pulled);

    const std::array<P1, 3> ps{P1::finite(c.p1()), P1::finite(c.p2()), P1::finite(c.p3())};
    auto at_special = [&](const P1& z) {
        for (const auto& p : ps)
            if (chordal_distance(z, p) <= 1e-7) return true;
        return false;
    };
    for (const auto& t : r.total.terms())
        if (!at_special(t.point)) r.h.add(t.point, -t.multiplicity);
    r.residual = r.total;
    r.residual.add(r.h);
    bool ok = r.total.degree() == 3 && r.residual.terms().size() == 3;
    for (const auto& p : ps) ok = ok && r.residual.multiplicity_at(p) == 1;
    if (!ok)
        throw PipelineFailure("direct pipeline: residual divisor is " + to_string(r.residual) +
                              ", expected [p1] + [p2] + [p3] (total degree " + std::to_string(r.total.degree()) +
                              ")");

    // F = h * correction. Its points are taken from the geometric divisors
    // (intersections, flexes, the line at infinity), which are better
    // conditioned than roots of the composed polynomials; the two must agree.
    Divisor from_correction = r.h;
    from_correction.add(corr);
    for (const auto& p : ps) r.coefficient.add(p, 1);
    r.coefficient.add(r.beta_p, -1);
    r.coefficient.add(r.beta_q_pulled, -1);
    bool same = from_correction.terms().size() == r.coefficient.terms().size();
    for (const auto& t : r.coefficient.terms()) same = same && from_correction.multiplicity_at(t.point) == t.multiplicity;
    if (!same)
        throw PipelineFailure("direct pipeline: h times the correction has divisor " + to_string(from_correction) +
                              ", expected " + to_string(r.coefficient));

    // derivative along v_P of F (beta_P x beta_Q) at p_i, F = C prod (t - z)^m
    auto leading = [&](const P1& p) {
        const cplx t0 = p.value();
        cplx v = 1.0;
        for (const auto& term : r.coefficient.terms()) {
            if (term.point.is_infinite() || chordal_distance(term.point, p) <= 1e-7) continue;
            v *= std::pow(t0 - term.point.value(), term.multiplicity);
        }
        return v;
    };
    const Vec2 vp1 = v_P(c, c.p1()), vp2 = v_P(c, c.p2()), vp3 = v_P(c, c.p3());
    const Vec2 vq1 = v_Q(c, c.q1()), vq2 = v_Q(c, c.q2()), vq3 = v_Q(c, c.q3());
    const std::array<cplx, 3> pair{omega(vp1, vp2) * omega(vq2, phi_push_v_P(c, c.p3())),
                                   omega(vp2, vp1) * omega(vq3, vp3),
                                   omega(vp3, phi_push_v_P(c, c.p2())) * omega(vq1, phi_push_v_P(c, c.p1()))};
    r.triple.provenance = Provenance::direct_pipeline;
    r.triple.n_p = c.n_p;
    r.triple.n_q = c.n_q;
    for (int i = 0; i < 3; ++i) r.triple.g[i] = field_value(c.tau_p, ps[i].value()) * leading(ps[i]) * pair[i];
    r.point = normalize(r.triple);
    return r;
}

inline JPoint direct_pipeline_data(const Construct& c) { return direct_pipeline(c).point; }

// ---------------------------------------------------------------------------
// Families and consistency

/// Members share (n_P, n_Q): the base construct moved by Q- and P-shears
/// with seeded parameters of size `spread`.
inline std::vector<Construct> seeded_family(std::uint64_t seed, int size, double spread = 0.1) {
    if (size < 1) throw InvalidInput("family size must be at least 1");
    std::vector<Construct> out{random_construct(seed).construct};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    int failures = 0;
    while (static_cast<int>(out.size()) < size) {
        const cplx eq = spread * detail::complex_gaussian(rng), ep = spread * detail::complex_gaussian(rng);
        try {
            out.push_back(affine_family(affine_family(out[0], {Side::Q}, eq), {Side::P}, ep));
        } catch (const NumericRejection&) {
            if (++failures > 100) throw;
        }
    }
    return out;
}

struct ConsistencyReport {
    double deviation = 0;
    std::vector<JPoint> direct, closed;
    /// direct / closed per member
    std::vector<JPoint> ratios;
};

inline ConsistencyReport consistency_check(const std::vector<Construct>& family,
                                           ClosedFormMutation mutation = ClosedFormMutation::none) {
    if (family.empty()) throw InvalidInput("consistency_check: empty family");
    const auto& f0 = family.front();
    for (const auto& c : family)
        if (std::abs(c.n_p - f0.n_p) > 1e-8 * std::max(1.0, std::abs(f0.n_p)) ||
            std::abs(c.n_q - f0.n_q) > 1e-8 * std::max(1.0, std::abs(f0.n_q)))
            throw InvalidInput("consistency_check: (n_P, n_Q) differ across the family");
    ConsistencyReport r;
    for (const auto& c : family) {
        r.direct.push_back(direct_pipeline_data(c));
        r.closed.push_back(closed_form_data(c, mutation));
        r.ratios.push_back({r.direct.back().a / r.closed.back().a, r.direct.back().b / r.closed.back().b});
    }
    for (const auto& q : r.ratios) {
        r.deviation = std::max(r.deviation, std::abs(q.a / r.ratios[0].a - 1.0));
        r.deviation = std::max(r.deviation, std::abs(q.b / r.ratios[0].b - 1.0));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Jacobian and scans

/// Moves the construct along the given shear directions, two real
/// parameters (re, im) per direction, applied in order.
inline Construct move_along(const Construct& c, const std::vector<Side>& directions, const Eigen::VectorXd& x,
                            const GuardOptions& guard = {}) {
    if (x.size() != 2 * static_cast<Eigen::Index>(directions.size()))
        throw InvalidInput("move_along: expected two real parameters per direction");
    Construct out = c;
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const cplx eps(x[2 * i], x[2 * i + 1]);
        if (eps != 0.0) out = affine_family(out, {directions[i]}, eps, guard);
    }
    return out;
}

/// log(J(x) / J(0)) as four real coordinates.
inline Eigen::VectorXd log_offset(const JPoint& j, const JPoint& base) {
    const cplx la = std::log(j.a / base.a), lb = std::log(j.b / base.b);
    Eigen::VectorXd v(4);
    v << la.real(), la.imag(), lb.real(), lb.imag();
    return v;
}

struct JacobianRankOptions {
    std::vector<Side> directions{Side::Q, Side::P};
    double h = 1e-5;
    double rank_tol = 1e-6;
    /// Richardson disagreement above this (relative to the largest entry) flags instability.
    double instability = 1e-4;
    GuardOptions guard{};
};

struct JacobianRankReport {
    JacobianReport jacobian;
    int rank = 0;
    bool unstable = false;
};

inline JacobianRankReport jacobian_rank(const Construct& c, const JacobianRankOptions& opt = {}) {
    const JPoint base = closed_form_data(c);
    RealMap f = [&](const Eigen::VectorXd& x) { return log_offset(closed_form_data(move_along(c, opt.directions, x, opt.guard)), base); };
    JacobianRankReport r;
    r.jacobian = finite_diff_jacobian(f, Eigen::VectorXd::Zero(2 * opt.directions.size()), opt.h, opt.rank_tol);
    r.rank = r.jacobian.rank;
    const double top = r.jacobian.jacobian.cwiseAbs().maxCoeff();
    r.unstable = !(r.jacobian.richardson_gap <= opt.instability * std::max(top, 1e-300));
    return r;
}

struct ScanTargetResult {
    JPoint target;     // multiplicative offset
    bool reached = false;
    int iterations = 0;
    double residual = 0;
    std::string failure;
};

struct ScanReport {
    std::uint64_t seed = 0;
    cplx n_p, n_q;
    std::vector<ScanTargetResult> results;
    int successes() const {
        int k = 0;
        for (const auto& r : results) k += r.reached;
        return k;
    }
};

struct ScanOptions {
    double tol = 1e-8;
    int max_iterations = 50;
    double fd_step = 1e-6;
};

/// Damped Newton on the four shear parameters driving log J toward
/// log(target) relative to the starting value.
inline ScanTargetResult newton_to_target(const Construct& c, const JPoint& target, const ScanOptions& opt = {}) {
    const std::vector<Side> dirs{Side::Q, Side::P};
    const JPoint base = closed_form_data(c);
    auto residual_at = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const JPoint j = closed_form_data(move_along(c, dirs, x));
        // principal log of the remaining ratio, so the residual has no branch jumps
        const cplx ra = std::log(j.a / (base.a * target.a)), rb = std::log(j.b / (base.b * target.b));
        Eigen::VectorXd v(4);
        v << ra.real(), ra.imag(), rb.real(), rb.imag();
        return v;
    };
    ScanTargetResult out;
    out.target = target;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd r = residual_at(x);
    double norm = r.cwiseAbs().maxCoeff();
    while (norm > opt.tol && out.iterations < opt.max_iterations) {
        ++out.iterations;
        Eigen::MatrixXd jac(4, 4);
        try {
            for (int i = 0; i < 4; ++i) {
                Eigen::VectorXd xp = x, xm = x;
                xp[i] += opt.fd_step;
                xm[i] -= opt.fd_step;
                jac.col(i) = (residual_at(xp) - residual_at(xm)) / (2 * opt.fd_step);
            }
        } catch (const NumericRejection& e) {
            out.failure = std::string("Jacobian evaluation rejected: ") + e.what();
            break;
        }
        const Eigen::VectorXd step = jac.fullPivLu().solve(-r);
        if (!step.allFinite()) {
            out.failure = "singular Jacobian";
            break;
        }
        double damp = 1.0;
        bool accepted = false;
        for (int k = 0; k < 12 && !accepted; ++k, damp /= 2) {
            try {
                const Eigen::VectorXd xn = x + damp * step;
                const Eigen::VectorXd rn = residual_at(xn);
                const double nn = rn.cwiseAbs().maxCoeff();
                if (nn < norm || nn <= opt.tol) {
                    x = xn;
                    r = rn;
                    norm = nn;
                    accepted = true;
                }
            } catch (const NumericRejection&) {
            }
        }
        if (!accepted) {
            out.failure = "line search stalled";
            break;
        }
    }
    out.residual = norm;
    out.reached = norm <= opt.tol;
    if (!out.reached && out.failure.empty()) out.failure = "iteration cap reached";
    return out;
}

/// Targets exp(z) per coordinate with |z| <= radius, drawn from the seed.
inline std::vector<JPoint> random_targets(std::uint64_t seed, int count, double radius = 1.0) {
    std::mt19937_64 rng(seed ^ 0x51ed270b3b2a9f1dULL);
    auto unit = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    std::vector<JPoint> out;
    for (int i = 0; i < count; ++i) {
        auto draw = [&] { return std::exp(std::polar(radius * std::sqrt(unit()), 2.0 * std::numbers::pi * unit())); };
        const cplx a = draw(), b = draw();
        out.push_back({a, b});
    }
    return out;
}

inline ScanReport surjectivity_scan(std::uint64_t seed, const std::vector<JPoint>& targets, const ScanOptions& opt = {}) {
    const Construct c = random_construct(seed).construct;
    ScanReport rep;
    rep.seed = seed;
    rep.n_p = c.n_p;
    rep.n_q = c.n_q;
    for (const auto& t : targets) rep.results.push_back(newton_to_target(c, t, opt));
    return rep;
}

/// The triple as a class on the double-locus curve of the duncehat
/// surface (one curve, one triple point, three branches).
inline NumericPicClass as_pic_class(const GluingTriple& t) {
    const auto g = double_locus_graph(duncehat_surface_description());
    return pic_normalize(g, std::vector<cplx>(t.g.begin(), t.g.end()));
}

} // namespace dunce
