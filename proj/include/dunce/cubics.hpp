#pragma once

// Parametrized nodal plane cubics and the construct built from a pair of
// them: implicit equations normalized by the residue at a node branch,
// flexes, projective coordinates tau on the normalizations, intersections,
// the gluing map phi and the affine families that keep (n_P, n_Q) fixed.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunce/numerics.hpp"

namespace dunce {

using Vec2 = Eigen::Vector2cd;
using Vec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3cd;
using Coeffs = Eigen::Matrix<cplx, 3, 4>; // rows X, Y, Z; column k = coefficient of t^k

enum class Side { P, Q };
inline const char* to_string(Side s) { return s == Side::P ? "P" : "Q"; }

// ---------------------------------------------------------------------------
// Cubic forms

/// Homogeneous cubic in (X, Y, Z). Monomial order:
/// X^3, X^2Y, X^2Z, XY^2, XYZ, XZ^2, Y^3, Y^2Z, YZ^2, Z^3.
struct CubicForm {
    std::array<cplx, 10> c{};

    static constexpr std::array<std::array<int, 3>, 10> exponents{{{3, 0, 0},
                                                                   {2, 1, 0},
                                                                   {2, 0, 1},
                                                                   {1, 2, 0},
                                                                   {1, 1, 1},
                                                                   {1, 0, 2},
                                                                   {0, 3, 0},
                                                                   {0, 2, 1},
                                                                   {0, 1, 2},
                                                                   {0, 0, 3}}};

    static cplx monomial(int k, const Vec3& v) {
        const auto& e = exponents[k];
        return std::pow(v[0], e[0]) * std::pow(v[1], e[1]) * std::pow(v[2], e[2]);
    }

    double norm() const {
        double s = 0;
        for (auto a : c) s += std::norm(a);
        return std::sqrt(s);
    }
    CubicForm scaled(cplx s) const {
        CubicForm out = *this;
        for (auto& a : out.c) a *= s;
        return out;
    }

    cplx operator()(const Vec3& v) const {
        cplx s = 0;
        for (int k = 0; k < 10; ++k) s += c[k] * monomial(k, v);
        return s;
    }
    /// |F(v)| relative to |F| |v|^3.
    double relative_value(const Vec3& v) const { return std::abs((*this)(v)) / (norm() * std::pow(v.norm(), 3)); }

    Vec3 gradient(const Vec3& v) const {
        Vec3 g = Vec3::Zero();
        for (int k = 0; k < 10; ++k) {
            const auto& e = exponents[k];
            for (int i = 0; i < 3; ++i) {
                if (e[i] == 0) continue;
                auto d = e;
                --d[i];
                g[i] += c[k] * static_cast<double>(e[i]) * std::pow(v[0], d[0]) * std::pow(v[1], d[1]) *
                        std::pow(v[2], d[2]);
            }
        }
        return g;
    }

    Mat3 hessian(const Vec3& v) const {
        Mat3 h = Mat3::Zero();
        for (int k = 0; k < 10; ++k) {
            const auto& e = exponents[k];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    auto d = e;
                    double f = d[i];
                    --d[i];
                    if (f == 0) continue;
                    f *= d[j];
                    --d[j];
                    if (f == 0) continue;
                    h(i, j) += c[k] * f * std::pow(v[0], d[0]) * std::pow(v[1], d[1]) * std::pow(v[2], d[2]);
                }
        }
        return h;
    }

    /// F(g0(t), g1(t), g2(t)) as a polynomial.
    Poly compose(const std::array<Poly, 3>& g) const {
        Poly out({0.0});
        for (int k = 0; k < 10; ++k) {
            const auto& e = exponents[k];
            Poly term({c[k]});
            for (int i = 0; i < 3; ++i)
                for (int r = 0; r < e[i]; ++r) term = term * g[i];
            out = out + term;
        }
        return out;
    }

    /// The cubic F(M^{-1} v): the image curve under v -> M v.
    CubicForm transformed(const Mat3& m) const {
        // sample-and-solve keeps this independent of expansion bookkeeping
        const Mat3 inv = m.inverse();
        Eigen::Matrix<cplx, 10, 10> a;
        Eigen::Matrix<cplx, 10, 1> rhs;
        for (int s = 0; s < 10; ++s) {
            const Vec3 v(std::polar(1.0, 0.7 * s), std::polar(1.3, 1.9 * s + 0.2), std::polar(0.8, 2.9 * s + 0.5));
            for (int k = 0; k < 10; ++k) a(s, k) = monomial(k, v);
            rhs[s] = (*this)(inv * v);
        }
        Eigen::Matrix<cplx, 10, 1> sol = a.fullPivLu().solve(rhs);
        CubicForm out;
        for (int k = 0; k < 10; ++k) out.c[k] = sol[k];
        return out;
    }
};

// ---------------------------------------------------------------------------
// Parametrizations

inline std::array<Poly, 3> component_polys(const Coeffs& c) {
    std::array<Poly, 3> g;
    for (int i = 0; i < 3; ++i) g[i] = Poly({c(i, 0), c(i, 1), c(i, 2), c(i, 3)});
    return g;
}

inline Vec3 eval_point(const Coeffs& c, cplx t) {
    const Eigen::Matrix<cplx, 4, 1> m(1.0, t, t * t, t * t * t);
    return c * m;
}

inline Vec3 eval_velocity(const Coeffs& c, cplx t) {
    const Eigen::Matrix<cplx, 4, 1> m(0.0, 1.0, 2.0 * t, 3.0 * t * t);
    return c * m;
}

inline Vec3 eval_acceleration(const Coeffs& c, cplx t) {
    const Eigen::Matrix<cplx, 4, 1> m(0.0, 0.0, 2.0, 6.0 * t);
    return c * m;
}

/// Affine chart (x, y) = (X/Z, Y/Z).
inline Vec2 affine(const Vec3& v) { return Vec2(v[0] / v[2], v[1] / v[2]); }

/// d/dt of the affine image of the parametrization.
inline Vec2 affine_velocity(const Coeffs& c, cplx t) {
    const Vec3 p = eval_point(c, t), d = eval_velocity(c, t);
    const cplx z2 = p[2] * p[2];
    return Vec2((d[0] * p[2] - p[0] * d[2]) / z2, (d[1] * p[2] - p[1] * d[2]) / z2);
}

/// det(gamma, gamma', gamma'') as a cubic polynomial, assembled from the 3x3
/// minors of the coefficient matrix (the Wronskian of t^i, t^j, t^k is
/// (j-i)(k-i)(k-j) t^(i+j+k-3)).
inline Poly wronskian(const Coeffs& c) {
    std::vector<cplx> w(4, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) {
                Mat3 m;
                m.col(0) = c.col(i);
                m.col(1) = c.col(j);
                m.col(2) = c.col(k);
                w[i + j + k - 3] += m.determinant() * static_cast<double>((j - i) * (k - i) * (k - j));
            }
    return Poly(w);
}

/// Sample parameters spread over the whole projective line: a Fibonacci
/// lattice on the sphere pulled back by stereographic projection, as
/// homogeneous pairs (t, 1) or (1, 1/t) whichever is bounded.
inline std::vector<std::array<cplx, 2>> sphere_samples(int count) {
    std::vector<std::array<cplx, 2>> out;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        // point on the unit sphere -> [x : y] with |x|^2 + |y|^2 = 1
        const cplx x = std::polar(std::sqrt((1.0 + z) / 2.0), golden * i);
        const cplx y = std::sqrt((1.0 - z) / 2.0);
        out.push_back({x, y});
    }
    return out;
}

inline Vec3 eval_homogeneous(const Coeffs& c, cplx x, cplx y) {
    const Eigen::Matrix<cplx, 4, 1> m(y * y * y, x * y * y, x * x * y, x * x * x);
    return c * m;
}

/// Nonzero cubic form vanishing on the image, from the nullspace of the
/// sampled 10-column system. The nullspace must be one-dimensional.
inline CubicForm implicitize(const Coeffs& c, double rel_tol = 1e-9) {
    constexpr int samples = 40;
    const auto params = sphere_samples(samples);
    Eigen::Matrix<cplx, samples, 10> a;
    for (int s = 0; s < samples; ++s) {
        Vec3 v = eval_homogeneous(c, params[s][0], params[s][1]);
        v /= v.norm();
        for (int k = 0; k < 10; ++k) a(s, k) = CubicForm::monomial(k, v);
    }
    Eigen::JacobiSVD<Eigen::Matrix<cplx, samples, 10>> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv[9] <= rel_tol * sv[0]) || !(sv[8] > 1e3 * rel_tol * sv[0]))
        throw NumericRejection("degenerate_cubic", "implicitization nullspace is not one-dimensional");
    CubicForm f;
    for (int k = 0; k < 10; ++k) f.c[k] = svd.matrixV()(k, 9);
    return f;
}

/// Residue at t = u of the pulled-back form dx / f_y (or -dy / f_x, the
/// better-conditioned of the two), where f_y(gamma(t)) has a simple zero.
inline cplx node_residue(const CubicForm& f, const Coeffs& c, cplx u) {
    const Vec3 p = eval_point(c, u);
    const Vec3 pa(p[0] / p[2], p[1] / p[2], 1.0);
    const Mat3 h = f.hessian(pa);
    const Vec2 v = affine_velocity(c, u);
    const cplx den_y = h(1, 0) * v[0] + h(1, 1) * v[1];
    const cplx den_x = h(0, 0) * v[0] + h(0, 1) * v[1];
    if (std::abs(den_y) >= std::abs(den_x)) return v[0] / den_y;
    return -v[1] / den_x;
}

/// Rescales f so the residue form has residue 1 at t = u.
inline CubicForm normalize_residue(const CubicForm& f, const Coeffs& c, cplx u) {
    const cplx res = node_residue(f, c, u);
    if (!(std::abs(res) > 1e-12) || !std::isfinite(std::abs(res)))
        throw NumericRejection("residue", "residue at the node branch vanishes");
    return f.scaled(res);
}

// ---------------------------------------------------------------------------
// Nodal cubics

struct NodalCubic {
    Coeffs coeffs;
    /// Residue-normalized: Res_{u1} of the residue form equals 1.
    CubicForm f;
    cplx u1, u2;
    /// Roots of the Wronskian, sorted by (real, imag).
    std::array<cplx, 3> flexes;

    std::array<Poly, 3> polys() const { return component_polys(coeffs); }
    Vec3 point(cplx t) const { return eval_point(coeffs, t); }
    Vec2 affine_point(cplx t) const { return affine(point(t)); }
    Vec2 velocity(cplx t) const { return affine_velocity(coeffs, t); }
    Vec3 node() const { return point(u1); }
    /// f in the affine chart at a plane point.
    cplx f_affine(const Vec3& v) const { return f(Vec3(v[0] / v[2], v[1] / v[2], 1.0)); }
    /// The residue form dx/f_y = alpha(t) dt at a smooth parameter.
    cplx residue_form(cplx t) const {
        const Vec3 p = point(t);
        const Vec3 pa(p[0] / p[2], p[1] / p[2], 1.0);
        const Vec3 g = f.gradient(pa);
        const Vec2 v = velocity(t);
        return std::abs(g[1]) >= std::abs(g[0]) ? v[0] / g[1] : -v[1] / g[0];
    }
};

namespace detail {

inline bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

inline void sort_lex(std::vector<cplx>& v) {
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
}

} // namespace detail

/// Node parameters from the kernel of the coefficient matrix: gamma(u1) and
/// gamma(u2) are proportional iff a combination of (1,u,u^2,u^3) at u1 and
/// u2 lies in the kernel, whose entries then obey w_{k+2} = e1 w_{k+1} - e2 w_k.
inline std::pair<cplx, cplx> node_parameters(const Coeffs& c) {
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 3, 4>> svd(c, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv[2] > 1e-8 * sv[0])) throw NumericRejection("degenerate_cubic", "coefficient matrix has rank below 3");
    const Eigen::Matrix<cplx, 4, 1> w = svd.matrixV().col(3);
    Eigen::Matrix2cd a;
    a << w[1], -w[0], w[2], -w[1];
    const Eigen::Vector2cd rhs(w[2], w[3]);
    if (std::abs(a.determinant()) < 1e-12) throw NumericRejection("degenerate_cubic", "node parameters at infinity");
    const Eigen::Vector2cd e = a.fullPivLu().solve(rhs);
    auto r = poly_roots(Poly{e[1], -e[0], 1.0});
    if (detail::close(r[0], r[1], 1e-6)) throw NumericRejection("degenerate_cubic", "cusp (node parameters coincide)");
    return {r[0], r[1]};
}

/// Builds and validates a nodal cubic from its parametrization. With
/// swap_order the node branch parameters (u1, u2) are exchanged.
inline NodalCubic make_nodal_cubic(const Coeffs& coeffs, bool swap_order = false, const Tolerances& tol = {}) {
    NodalCubic c;
    c.coeffs = coeffs / coeffs.norm();
    auto [a, b] = node_parameters(c.coeffs);
    c.u1 = swap_order ? b : a;
    c.u2 = swap_order ? a : b;
    const Vec3 n1 = c.point(c.u1), n2 = c.point(c.u2);
    if (n1.cross(n2).norm() > 1e-8 * n1.norm() * n2.norm())
        throw NumericRejection("degenerate_cubic", "node branches do not meet");
    if (std::abs(n1[2]) < 1e-6 * n1.norm()) throw NumericRejection("chart", "node at infinity");
    CubicForm f = implicitize(c.coeffs);
    // nodal: the gradient vanishes at the node
    if (f.gradient(n1).norm() > 1e-7 * f.norm() * std::pow(n1.norm(), 2))
        throw NumericRejection("degenerate_cubic", "implicit equation is not singular at the node");
    c.f = normalize_residue(f, c.coeffs, c.u1);

    const Poly w = wronskian(c.coeffs);
    if (w.trimmed(1e-10).degree() != 3) throw NumericRejection("flex", "Wronskian degree is not 3");
    auto fl = poly_roots(w, tol);
    for (std::size_t i = 0; i < fl.size(); ++i) {
        for (std::size_t j = i + 1; j < fl.size(); ++j)
            if (detail::close(fl[i], fl[j], 1e-6)) throw NumericRejection("flex", "flexes are not distinct");
        if (detail::close(fl[i], c.u1, 1e-6) || detail::close(fl[i], c.u2, 1e-6))
            throw NumericRejection("flex", "a node branch is inflectional");
    }
    std::copy(fl.begin(), fl.end(), c.flexes.begin());
    return c;
}

/// Residue of the normalized form at a node branch, computed by two-point
/// extrapolation of (t - u) alpha(t).
inline cplx residue_by_extrapolation(const NodalCubic& c, cplx u, double eps = 1e-5) {
    const cplx e(eps, 0.3 * eps);
    const cplx r1 = e * c.residue_form(u + e);
    const cplx r2 = 2.0 * e * c.residue_form(u + 2.0 * e);
    return 2.0 * r1 - r2;
}

// ---------------------------------------------------------------------------
// Intersections

struct IntersectionPair {
    cplx t_p; // parameter on P
    cplx s_q; // parameter on Q
    Vec3 point;
};

/// Roots of F_Q(gamma_P) and of F_P(gamma_Q), matched by image point.
inline std::vector<IntersectionPair> intersect(const NodalCubic& p, const NodalCubic& q, const Tolerances& tol = {}) {
    const Poly fp = q.f.compose(p.polys()), fq = p.f.compose(q.polys());
    if (fp.trimmed(1e-10).degree() != 9 || fq.trimmed(1e-10).degree() != 9)
        throw NumericRejection("chart", "an intersection lies at the parameter infinity");
    auto tp = poly_roots(fp, tol), sq = poly_roots(fq, tol);
    for (auto* roots : {&tp, &sq})
        for (std::size_t i = 0; i < roots->size(); ++i)
            for (std::size_t j = i + 1; j < roots->size(); ++j)
                if (detail::close((*roots)[i], (*roots)[j], 1e-6))
                    throw NumericRejection("tangency", "intersection roots cluster (non-transverse intersection)");
    auto unit = [](Vec3 v) {
        v /= v.norm();
        // fix the phase so equal projective points have equal representatives
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(v[i]) > std::abs(v[k])) k = i;
        return Vec3(v * (std::abs(v[k]) / v[k]));
    };
    std::vector<IntersectionPair> out;
    std::vector<bool> used(sq.size(), false);
    for (auto t : tp) {
        const Vec3 a = unit(p.point(t));
        int best = -1;
        double best_d = 1e300, second = 1e300;
        for (std::size_t j = 0; j < sq.size(); ++j) {
            const double d = (a - unit(q.point(sq[j]))).norm();
            if (d < best_d) {
                second = best_d;
                best_d = d;
                best = static_cast<int>(j);
            } else if (d < second) {
                second = d;
            }
        }
        if (best < 0 || used[best] || best_d > 1e-7 || second < 1e-4)
            throw NumericRejection("matching", "intersection points could not be matched uniquely");
        used[best] = true;
        out.push_back({t, sq[best], p.point(t)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Construct

struct ConstructChoices {
    bool swap_p = false;
    bool swap_q = false;
    /// Index of n among the intersections sorted by (Re, Im) of the P parameter.
    int intersection = 0;
    /// When set, n is the intersection closest to this point instead.
    std::optional<Vec3> n_hint;
    /// Parameter of b on P.
    cplx b = cplx(0.37, -0.21);
};

struct GuardOptions {
    bool allow_collinear = false;
    double collinear_sine = 1e-3;
    double on_curve = 1e-6;
    double separation = 1e-6;
};

struct Construct {
    NodalCubic P, Q;
    ConstructChoices choices;
    std::vector<IntersectionPair> intersections;
    int n_index = 0;
    cplx t_p3, s_q3;
    int psi_p = 0, psi_q = 0;
    Mobius tau_p = Mobius::identity(), tau_q = Mobius::identity();
    /// P-line to Q-line: p1 -> q2, p2 -> q3, p3 -> q1.
    Mobius phi = Mobius::identity();
    cplx n_p, n_q;
    Vec3 p_node, q_node, n_point;
    /// |det(p_N, q_N, n)| over the product of norms.
    double collinearity_sine = 0;

    cplx p1() const { return P.u1; }
    cplx p2() const { return P.u2; }
    cplx p3() const { return t_p3; }
    cplx q1() const { return Q.u1; }
    cplx q2() const { return Q.u2; }
    cplx q3() const { return s_q3; }
    cplx psi_P() const { return P.flexes[psi_p]; }
    cplx psi_Q() const { return Q.flexes[psi_q]; }
    cplx tau_b() const { return tau_p(choices.b).value(); }
    cplx phi_at(cplx t) const { return phi(t).value(); }
};

/// Flex choice rule: the flex minimizing (Re, Im) of its image under the map
/// sending (node branch 1, node branch 2, p3) to (0, infinity, 1). Returns
/// the index into the flex list.
inline int choose_flex(const NodalCubic& c, cplx third_point) {
    auto sigma = mobius_from_triple(c.u1, c.u2, third_point);
    int best = 0;
    cplx best_v;
    for (int i = 0; i < 3; ++i) {
        const P1 img = sigma(c.flexes[i]);
        if (img.is_infinite()) continue;
        const cplx v = img.value();
        if (i == 0 || v.real() < best_v.real() || (v.real() == best_v.real() && v.imag() < best_v.imag())) {
            best = i;
            best_v = v;
        }
    }
    return best;
}

/// tau with tau(u1) = 0, tau(u2) = infinity, tau(psi) = 1.
inline Mobius tau_coordinate(const NodalCubic& c, cplx psi) { return mobius_from_triple(c.u1, c.u2, psi); }

namespace detail {

inline double relative_det(const Vec3& a, const Vec3& b, const Vec3& c) {
    Mat3 m;
    m << a, b, c;
    return std::abs(m.determinant()) / (a.norm() * b.norm() * c.norm());
}

inline void require_finite_point(const Vec3& v, const char* what) {
    if (std::abs(v[2]) < 1e-6 * v.norm())
        throw NumericRejection("chart", std::string(what) + " lies on the line at infinity");
}

} // namespace detail

/// Assembles and validates a construct. Guard failures throw
/// NumericRejection naming the guard.
inline Construct make_construct(const Coeffs& p_coeffs, const Coeffs& q_coeffs, const ConstructChoices& ch,
                                const GuardOptions& guard = {}, const Tolerances& tol = {}) {
    Construct c;
    c.choices = ch;
    c.P = make_nodal_cubic(p_coeffs, ch.swap_p, tol);
    c.Q = make_nodal_cubic(q_coeffs, ch.swap_q, tol);
    c.p_node = c.P.node();
    c.q_node = c.Q.node();
    detail::require_finite_point(c.p_node, "the node of P");
    detail::require_finite_point(c.q_node, "the node of Q");
    if (c.Q.f.relative_value(c.p_node) < guard.on_curve)
        throw NumericRejection("node_on_curve", "Q passes through the node of P");
    if (c.P.f.relative_value(c.q_node) < guard.on_curve)
        throw NumericRejection("node_on_curve", "P passes through the node of Q");
    // chart genericity: H meets each cubic in three distinct finite parameters
    for (const NodalCubic* k : {&c.P, &c.Q}) {
        const Poly z = k->polys()[2];
        if (z.trimmed(1e-10).degree() != 3) throw NumericRejection("chart", "the line at infinity passes through gamma(infinity)");
        auto r = poly_roots(z, tol);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (detail::close(r[i], r[j], 1e-6)) throw NumericRejection("chart", "cubic tangent to the line at infinity");
    }

    c.intersections = intersect(c.P, c.Q, tol);
    std::sort(c.intersections.begin(), c.intersections.end(), [](const IntersectionPair& a, const IntersectionPair& b) {
        return a.t_p.real() != b.t_p.real() ? a.t_p.real() < b.t_p.real() : a.t_p.imag() < b.t_p.imag();
    });
    if (ch.n_hint) {
        double best = 1e300;
        for (int i = 0; i < 9; ++i) {
            Vec3 a = c.intersections[i].point, h = *ch.n_hint;
            const double d = a.cross(h).norm() / (a.norm() * h.norm());
            if (d < best) {
                best = d;
                c.n_index = i;
            }
        }
        if (best > 1e-6) throw NumericRejection("matching", "the chosen intersection n was lost");
    } else {
        if (ch.intersection < 0 || ch.intersection >= 9) throw InvalidInput("intersection index must be in 0..8");
        c.n_index = ch.intersection;
    }
    c.t_p3 = c.intersections[c.n_index].t_p;
    c.s_q3 = c.intersections[c.n_index].s_q;
    c.n_point = c.intersections[c.n_index].point;
    detail::require_finite_point(c.n_point, "n");

    c.collinearity_sine = detail::relative_det(c.p_node, c.q_node, c.n_point);
    if (!guard.allow_collinear && c.collinearity_sine < guard.collinear_sine)
        throw NumericRejection("collinear", "p_N, q_N and n are collinear (outside M^u_X)");

    // b: a smooth point of P away from n, p_N, the blown-up points and the flexes
    const cplx b = ch.b;
    if (detail::close(b, c.t_p3, guard.separation)) throw NumericRejection("b_position", "b coincides with n");
    if (detail::close(b, c.P.u1, guard.separation) || detail::close(b, c.P.u2, guard.separation))
        throw NumericRejection("b_position", "b coincides with p_N");
    for (const auto& x : c.intersections)
        if (detail::close(b, x.t_p, guard.separation))
            throw NumericRejection("b_position", "b coincides with an intersection point");
    detail::require_finite_point(c.P.point(b), "b");

    c.psi_p = choose_flex(c.P, c.t_p3);
    c.psi_q = choose_flex(c.Q, c.s_q3);
    for (int i = 0; i < 3; ++i)
        if (detail::close(b, c.P.flexes[i], guard.separation))
            throw NumericRejection("b_position", "b coincides with a flex of P");
    c.tau_p = tau_coordinate(c.P, c.psi_P());
    c.tau_q = tau_coordinate(c.Q, c.psi_Q());
    c.n_p = c.tau_p(c.t_p3).value();
    c.n_q = c.tau_q(c.s_q3).value();
    for (cplx nv : {c.n_p, c.n_q})
        if (std::abs(nv) < 1e-6 || std::abs(nv - 1.0) < 1e-6 || std::abs(nv - 0.5) < 1e-6 || !std::isfinite(std::abs(nv)))
            throw NumericRejection("tau", "n value is degenerate (p3 meets a flex or a node branch)");
    const auto m_p = mobius_from_triple(c.P.u1, c.P.u2, c.t_p3);
    const auto m_q = mobius_from_triple(c.Q.u2, c.s_q3, c.Q.u1);
    c.phi = m_q.inverse() * m_p;
    const auto check = [&](cplx from, cplx to) {
        const P1 img = c.phi(from);
        return chordal_distance(img, P1::finite(to)) < 1e-8;
    };
    if (!check(c.P.u1, c.Q.u2) || !check(c.P.u2, c.s_q3) || !check(c.t_p3, c.Q.u1))
        throw NumericRejection("phi", "gluing map does not send (p1, p2, p3) to (q2, q3, q1)");
    // the relevant points must be finite in parameter space after gluing
    if (std::abs(c.tau_b()) < 1e-8 || !std::isfinite(std::abs(c.tau_b())))
        throw NumericRejection("b_position", "tau(b) is degenerate");
    return c;
}

/// Recomputes everything from the stored parametrizations and choices.
inline Construct revalidate(const Construct& c, const GuardOptions& guard = {}) {
    ConstructChoices ch = c.choices;
    // the stored u1 is canonical: rebuild without swapping and compare
    auto r = make_construct(c.P.coeffs, c.Q.coeffs, ch, guard);
    if (std::abs(r.n_p - c.n_p) > 1e-8 * std::max(1.0, std::abs(c.n_p)) ||
        std::abs(r.n_q - c.n_q) > 1e-8 * std::max(1.0, std::abs(c.n_q)))
        throw NumericRejection("revalidate", "recomputed n values disagree");
    return r;
}

// ---------------------------------------------------------------------------
// Random constructs

namespace detail {

/// Standard complex Gaussian from raw 64-bit draws (Box-Muller), so
/// sequences depend only on the engine.
inline cplx complex_gaussian(std::mt19937_64& rng) {
    auto unit = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    const double r = std::sqrt(-2.0 * std::log(unit()));
    const double a = 2.0 * std::numbers::pi * unit();
    return {r * std::cos(a) / std::sqrt(2.0), r * std::sin(a) / std::sqrt(2.0)};
}

} // namespace detail

inline Coeffs random_coeffs(std::mt19937_64& rng) {
    Coeffs c;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 4; ++k) c(i, k) = detail::complex_gaussian(rng);
    return c;
}

struct RandomConstruct {
    Construct construct;
    std::uint64_t seed = 0;
    int attempts = 0;
};

/// Rejection-samples parametrizations and choices from the seed until every
/// guard passes.
inline RandomConstruct random_construct(std::uint64_t seed, const GuardOptions& guard = {}, int max_attempts = 200) {
    std::mt19937_64 rng(seed);
    std::string last;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const Coeffs p = random_coeffs(rng), q = random_coeffs(rng);
        ConstructChoices ch;
        ch.intersection = static_cast<int>(rng() % 9);
        ch.b = detail::complex_gaussian(rng);
        try {
            return {make_construct(p, q, ch, guard), seed, attempt};
        } catch (const NumericRejection& e) {
            last = e.what();
        }
    }
    throw NumericRejection("random_construct", "no valid construct after " + std::to_string(max_attempts) +
                                                   " attempts (last: " + last + ")");
}

// ---------------------------------------------------------------------------
// Affine families

/// Unimodular shear of the affine chart fixing `fixed_a` and `fixed_b`:
/// x -> x + eps d l(x - a), d = (b - a) / |b - a|, l(d) = 0, |l| = 1.
/// Returned as a 3x3 matrix acting on homogeneous coordinates.
inline Mat3 shear_fixing(const Vec3& fixed_a, const Vec3& fixed_b, cplx eps) {
    const Vec2 a = affine(fixed_a), b = affine(fixed_b);
    const Vec2 d = (b - a).normalized();
    const Eigen::RowVector2cd l(-d[1], d[0]);
    Eigen::Matrix2cd lin = Eigen::Matrix2cd::Identity() + eps * d * l;
    const Vec2 shift = -eps * d * (l * a);
    Mat3 m = Mat3::Identity();
    m.topLeftCorner<2, 2>() = lin;
    m.topRightCorner<2, 1>() = shift;
    return m;
}

struct AffineFamilyDirection {
    /// Which cubic moves. Q moves by shears fixing n and p_N; P (with b) by
    /// shears fixing n and q_N.
    Side side = Side::Q;
};

/// Moves one cubic by the shear with parameter eps. Parameters are
/// transported, so node branches, flexes, b and the chosen intersection keep
/// their parameters; n_P and n_Q are asserted unchanged.
inline Construct affine_family(const Construct& c, AffineFamilyDirection dir, cplx eps, const GuardOptions& guard = {}) {
    Coeffs p = c.P.coeffs, q = c.Q.coeffs;
    if (dir.side == Side::Q)
        q = shear_fixing(c.n_point, c.p_node, eps) * q;
    else
        p = shear_fixing(c.n_point, c.q_node, eps) * p;
    ConstructChoices ch = c.choices;
    ch.n_hint = c.n_point;
    // the node ordering is carried by the parameters; rebuild and realign
    ch.swap_p = ch.swap_q = false;
    Construct out = make_construct(p, q, ch, guard);
    ch.swap_p = std::abs(out.P.u1 - c.P.u1) > std::abs(out.P.u1 - c.P.u2);
    ch.swap_q = std::abs(out.Q.u1 - c.Q.u1) > std::abs(out.Q.u1 - c.Q.u2);
    if (ch.swap_p || ch.swap_q) out = make_construct(p, q, ch, guard);
    const double drift = std::max(std::abs(out.n_p - c.n_p) / std::max(1.0, std::abs(c.n_p)),
                                  std::abs(out.n_q - c.n_q) / std::max(1.0, std::abs(c.n_q)));
    if (drift > 1e-7) throw NumericRejection("affine_family", "n values drifted along the family");
    return out;
}

/// Moves Q by an affine map fixing n that sends q_N to
/// n + 0.6 (p_N - n) + delta (p_N - n)^perp, so delta = 0 makes p_N, q_N and
/// n collinear.
inline Construct toward_collinear(const Construct& c, double delta, const GuardOptions& guard = {}) {
    const Vec2 n = affine(c.n_point), pn = affine(c.p_node), qn = affine(c.q_node);
    const Vec2 d = pn - n, vq = qn - n;
    const Vec2 target = 0.6 * d + delta * Vec2(-d[1], d[0]);
    // a second direction kept fixed
    const Vec2 e(cplx(0.3, 0.7), cplx(-1.1, 0.2));
    Eigen::Matrix2cd from, to;
    from << vq, e;
    to << target, e;
    if (std::abs(from.determinant()) < 1e-12) throw NumericRejection("collinear", "degenerate deformation");
    const Eigen::Matrix2cd lin = to * from.inverse();
    Mat3 m = Mat3::Identity();
    m.topLeftCorner<2, 2>() = lin;
    m.topRightCorner<2, 1>() = n - lin * n;
    ConstructChoices ch = c.choices;
    ch.n_hint = c.n_point;
    ch.swap_p = ch.swap_q = false;
    Construct out = make_construct(c.P.coeffs, m * c.Q.coeffs, ch, guard);
    ch.swap_p = std::abs(out.P.u1 - c.P.u1) > std::abs(out.P.u1 - c.P.u2);
    ch.swap_q = std::abs(out.Q.u1 - c.Q.u1) > std::abs(out.Q.u1 - c.Q.u2);
    if (ch.swap_p || ch.swap_q) out = make_construct(c.P.coeffs, m * c.Q.coeffs, ch, guard);
    return out;
}

/// Applies one projective-linear map to both cubics (and hence to every
/// derived point); parameters are unchanged.
inline Construct transport(const Construct& c, const Mat3& m, const GuardOptions& guard = {}) {
    ConstructChoices ch = c.choices;
    ch.n_hint = m * c.n_point;
    ch.swap_p = ch.swap_q = false;
    Construct out = make_construct(m * c.P.coeffs, m * c.Q.coeffs, ch, guard);
    ch.swap_p = std::abs(out.P.u1 - c.P.u1) > std::abs(out.P.u1 - c.P.u2);
    ch.swap_q = std::abs(out.Q.u1 - c.Q.u1) > std::abs(out.Q.u1 - c.Q.u2);
    if (ch.swap_p || ch.swap_q) out = make_construct(m * c.P.coeffs, m * c.Q.coeffs, ch, guard);
    return out;
}

} // namespace dunce
