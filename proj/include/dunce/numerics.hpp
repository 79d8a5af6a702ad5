#pragma once

// Complex kernels: polynomials and their roots, Mobius maps of the
// projective line, divisors of rational functions, finite-difference
// Jacobians.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunce/errors.hpp"

namespace dunce {

using cplx = std::complex<double>;

struct Tolerances {
    double root_residual = 1e-11;
    double cluster_radius = 1e-7;
    double rank_tol = 1e-6;
    double fd_step = 1e-5;
};

// ---------------------------------------------------------------------------
// Polynomials

/// Coefficients from the constant term up.
class Poly {
public:
    static constexpr int max_degree = 64;

    Poly() = default;
    explicit Poly(std::vector<cplx> c) : c_(std::move(c)) {}
    Poly(std::initializer_list<cplx> c) : c_(c) {}

    static Poly constant(cplx a) { return Poly({a}); }
    static Poly monomial(int k, cplx a = 1.0) {
        std::vector<cplx> c(k + 1, 0.0);
        c[k] = a;
        return Poly(c);
    }
    /// lead * prod (t - r)
    static Poly from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
        Poly p({lead});
        for (auto r : roots) p = p * Poly({-r, 1.0});
        return p;
    }

    const std::vector<cplx>& coeffs() const { return c_; }
    cplx coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : cplx(0); }
    /// Formal degree (length - 1); see trimmed() for the numerical one.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const {
        for (auto a : c_)
            if (a != 0.0) return false;
        return true;
    }
    double norm() const {
        double s = 0;
        for (auto a : c_) s = std::max(s, std::abs(a));
        return s;
    }

    /// Drops leading coefficients below rel * max|coefficient|.
    Poly trimmed(double rel = 1e-14) const {
        const double m = norm();
        auto c = c_;
        while (!c.empty() && std::abs(c.back()) <= rel * m) c.pop_back();
        return Poly(c);
    }

    cplx operator()(cplx z) const {
        cplx v = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * z + *it;
        return v;
    }
    /// sum |a_k| |z|^k, the natural scale for residuals at z.
    double scale_at(cplx z) const {
        double v = 0, r = std::abs(z);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * r + std::abs(*it);
        return v;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly({0.0});
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Poly(d);
    }

    /// Coefficient reversal t^deg p(1/t): the chart at infinity.
    Poly reversed(int deg) const {
        std::vector<cplx> c(deg + 1, 0.0);
        for (int k = 0; k <= deg; ++k) c[deg - k] = coeff(k);
        return Poly(c);
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
        return Poly(c);
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + b * cplx(-1.0); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.c_.empty() || b.c_.empty()) return Poly();
        std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Poly(c);
    }
    friend Poly operator*(const Poly& a, cplx s) {
        auto c = a.c_;
        for (auto& x : c) x *= s;
        return Poly(c);
    }

private:
    std::vector<cplx> c_;
};

struct RootCluster {
    cplx z;
    int multiplicity = 1;
};

namespace detail {

/// Aberth-Ehrlich iteration on a polynomial with nonzero leading coefficient.
inline std::vector<cplx> aberth(const Poly& p, double residual_tol) {
    const int n = p.degree();
    const Poly dp = p.derivative();
    const cplx lead = p.coeff(n);
    // Fujiwara-type radius around the centroid of the roots
    const cplx center = -p.coeff(n - 1) / (static_cast<double>(n) * lead);
    double radius = 0;
    {
        // coefficients of p(t + center)
        std::vector<cplx> shifted = p.coeffs();
        for (int i = 0; i < n; ++i)
            for (int k = n - 1; k >= i; --k) shifted[k] += center * shifted[k + 1];
        for (int k = 0; k < n; ++k) {
            const double r = std::pow(std::abs(shifted[k] / lead), 1.0 / (n - k));
            radius = std::max(radius, r);
        }
        radius = std::max(radius, 1e-3);
    }
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / n + 0.4;
        z[k] = center + radius * (1.0 + 0.05 * std::sin(1.3 * k + 0.7)) * std::polar(1.0, angle);
    }
    const int max_iter = 2000;
    for (int iter = 0; iter < max_iter; ++iter) {
        double biggest = 0;
        for (int k = 0; k < n; ++k) {
            const cplx pv = p(z[k]);
            if (std::abs(pv) <= 1e-17 * p.scale_at(z[k])) continue;
            const cplx ratio = pv / dp(z[k]);
            cplx sum = 0;
            for (int j = 0; j < n; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            cplx corr = ratio / (1.0 - ratio * sum);
            if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) corr = ratio;
            z[k] -= corr;
            biggest = std::max(biggest, std::abs(corr) / std::max(1.0, std::abs(z[k])));
        }
        if (biggest < 1e-15) break;
    }
    for (auto r : z) {
        const double res = std::abs(p(r));
        if (!(res <= residual_tol * p.scale_at(r)))
            throw NumericRejection("root_finder", "Aberth iteration did not converge (residual " +
                                                      std::to_string(res / p.scale_at(r)) + ")");
    }
    return z;
}

} // namespace detail

/// All roots with multiplicity (repeated entries), sorted by (real, imag).
/// Throws NumericRejection when the iteration does not converge.
inline std::vector<cplx> poly_roots(const Poly& input, const Tolerances& tol = {}) {
    const Poly p = input.trimmed();
    if (p.degree() < 1) throw InvalidInput("poly_roots: degree must be at least 1");
    if (p.degree() > Poly::max_degree) throw InvalidInput("poly_roots: degree above 64");
    // exact zero roots first
    int zeros = 0;
    while (zeros < p.degree() && p.coeff(zeros) == 0.0) ++zeros;
    std::vector<cplx> rest(p.coeffs().begin() + zeros, p.coeffs().end());
    std::vector<cplx> roots(zeros, 0.0);
    const Poly q(rest);
    if (q.degree() == 1) {
        roots.push_back(-q.coeff(0) / q.coeff(1));
    } else if (q.degree() > 1) {
        auto r = detail::aberth(q, tol.root_residual);
        roots.insert(roots.end(), r.begin(), r.end());
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

/// Groups numerically multiple roots. Points within the cluster radius
/// always merge; a looser group of k roots merges when p and its first k-1
/// derivatives vanish at the group's mean (perturbed k-fold roots spread
/// like eps^(1/k)).
inline std::vector<RootCluster> cluster_roots(const Poly& input, const std::vector<cplx>& roots,
                                              const Tolerances& tol = {}) {
    const Poly p = input.trimmed();
    const std::size_t n = roots.size();
    auto group_by = [&](double radius) {
        std::vector<int> label(n, -1);
        int next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (label[i] >= 0) continue;
            label[i] = next;
            std::vector<std::size_t> stack{i};
            while (!stack.empty()) {
                auto a = stack.back();
                stack.pop_back();
                for (std::size_t b = 0; b < n; ++b)
                    if (label[b] < 0 && std::abs(roots[a] - roots[b]) <= radius * std::max(1.0, std::abs(roots[a]))) {
                        label[b] = next;
                        stack.push_back(b);
                    }
            }
            ++next;
        }
        return std::make_pair(label, next);
    };
    auto [tight, nt] = group_by(tol.cluster_radius);
    auto [loose, nl] = group_by(1e-3);
    std::vector<RootCluster> out;
    std::vector<bool> used(n, false);
    for (int g = 0; g < nl; ++g) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (loose[i] == g) members.push_back(i);
        cplx mean = 0;
        for (auto i : members) mean += roots[i];
        mean /= static_cast<double>(members.size());
        bool genuine = members.size() > 1;
        Poly d = p;
        const double k = static_cast<double>(members.size());
        for (std::size_t j = 0; genuine && j < members.size(); ++j) {
            const double allowed = std::pow(1e-10, (k - static_cast<double>(j)) / k);
            if (std::abs(d(mean)) > allowed * std::max(d.scale_at(mean), 1e-300)) genuine = false;
            d = d.derivative();
        }
        if (genuine) {
            // the (k-1)-th derivative has a simple root at a k-fold root
            Poly dk = p;
            for (std::size_t j = 0; j + 1 < members.size(); ++j) dk = dk.derivative();
            const Poly dk1 = dk.derivative();
            for (int it = 0; it < 5; ++it) {
                const cplx slope = dk1(mean);
                if (std::abs(slope) == 0.0) break;
                const cplx step = dk(mean) / slope;
                if (std::abs(step) > 1e-3 * std::max(1.0, std::abs(mean))) break;
                mean -= step;
            }
            out.push_back({mean, static_cast<int>(members.size())});
            for (auto i : members) used[i] = true;
        }
    }
    for (int g = 0; g < nt; ++g) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (tight[i] == g && !used[i]) members.push_back(i);
        if (members.empty()) continue;
        cplx mean = 0;
        for (auto i : members) mean += roots[i];
        out.push_back({mean / static_cast<double>(members.size()), static_cast<int>(members.size())});
    }
    std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
        return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
    });
    return out;
}

// ---------------------------------------------------------------------------
// Projective line

/// Homogeneous point [x : y] of the projective line; y = 0 is infinity.
struct P1 {
    cplx x = 0.0, y = 1.0;

    static P1 finite(cplx z) { return {z, 1.0}; }
    static P1 infinity() { return {1.0, 0.0}; }

    bool is_infinite(double tol = 1e-12) const { return std::abs(y) <= tol * std::abs(x); }
    cplx value() const { return x / y; }
};

inline cplx det(const P1& a, const P1& b) { return a.x * b.y - a.y * b.x; }

/// Chordal distance, bounded by 1, finite at infinity.
inline double chordal_distance(const P1& a, const P1& b) {
    const double na = std::sqrt(std::norm(a.x) + std::norm(a.y));
    const double nb = std::sqrt(std::norm(b.x) + std::norm(b.y));
    return std::abs(det(a, b)) / (na * nb);
}

class Mobius {
public:
    /// (a t + b) / (c t + d), stored scaled to unit Frobenius norm.
    Mobius(cplx a, cplx b, cplx c, cplx d) : m_{a, b, c, d} {
        const double s = std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
        if (!(s > 0)) throw NumericRejection("mobius", "zero matrix");
        for (auto& v : m_) v /= s;
        if (std::abs(determinant()) < 1e-12) throw NumericRejection("mobius", "singular matrix");
    }
    static Mobius identity() { return {1.0, 0.0, 0.0, 1.0}; }

    cplx a() const { return m_[0]; }
    cplx b() const { return m_[1]; }
    cplx c() const { return m_[2]; }
    cplx d() const { return m_[3]; }
    cplx determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

    P1 operator()(const P1& p) const { return {m_[0] * p.x + m_[1] * p.y, m_[2] * p.x + m_[3] * p.y}; }
    P1 operator()(cplx t) const { return (*this)(P1::finite(t)); }

    /// d/dt of the map at a finite t with finite image.
    cplx derivative(cplx t) const {
        const cplx den = m_[2] * t + m_[3];
        return determinant() / (den * den);
    }

    Mobius inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }
    friend Mobius operator*(const Mobius& f, const Mobius& g) {
        return {f.m_[0] * g.m_[0] + f.m_[1] * g.m_[2], f.m_[0] * g.m_[1] + f.m_[1] * g.m_[3],
                f.m_[2] * g.m_[0] + f.m_[3] * g.m_[2], f.m_[2] * g.m_[1] + f.m_[3] * g.m_[3]};
    }

private:
    std::array<cplx, 4> m_;
};

/// The map sending (a, b, c) to (0, infinity, 1).
inline Mobius mobius_from_triple(const P1& a, const P1& b, const P1& c, double tol = 1e-10) {
    if (chordal_distance(a, b) < tol || chordal_distance(b, c) < tol || chordal_distance(a, c) < tol)
        throw NumericRejection("mobius", "defining points coincide");
    const cplx k1 = det(c, b), k2 = det(c, a);
    return {a.y * k1, -a.x * k1, b.y * k2, -b.x * k2};
}

inline Mobius mobius_from_triple(cplx a, cplx b, cplx c, double tol = 1e-10) {
    return mobius_from_triple(P1::finite(a), P1::finite(b), P1::finite(c), tol);
}

// ---------------------------------------------------------------------------
// Divisors

struct DivisorTerm {
    P1 point;
    int multiplicity = 0;
};

class Divisor {
public:
    const std::vector<DivisorTerm>& terms() const { return terms_; }
    int degree() const {
        int d = 0;
        for (const auto& t : terms_) d += t.multiplicity;
        return d;
    }
    bool empty() const { return terms_.empty(); }

    /// Adds m * [p], merging with an existing point within tol (chordal).
    void add(const P1& p, int m, double tol = 1e-7) {
        if (m == 0) return;
        for (auto it = terms_.begin(); it != terms_.end(); ++it) {
            if (chordal_distance(it->point, p) <= tol) {
                it->multiplicity += m;
                if (it->multiplicity == 0) terms_.erase(it);
                return;
            }
        }
        terms_.push_back({p, m});
    }
    void add(const Divisor& d, int sign = 1, double tol = 1e-7) {
        for (const auto& t : d.terms_) add(t.point, sign * t.multiplicity, tol);
    }
    int multiplicity_at(const P1& p, double tol = 1e-7) const {
        for (const auto& t : terms_)
            if (chordal_distance(t.point, p) <= tol) return t.multiplicity;
        return 0;
    }

private:
    std::vector<DivisorTerm> terms_;
};

/// Zeros minus poles of num/den on the projective line, infinity included.
inline Divisor rational_divisor(const Poly& num, const Poly& den, const Tolerances& tol = {}) {
    const Poly n = num.trimmed(), d = den.trimmed();
    if (n.degree() < 0 || d.degree() < 0) throw InvalidInput("rational_divisor: zero polynomial");
    Divisor out;
    const double merge = std::max(tol.cluster_radius, 1e-7);
    if (n.degree() >= 1)
        for (const auto& c : cluster_roots(n, poly_roots(n, tol), tol)) out.add(P1::finite(c.z), c.multiplicity, merge);
    if (d.degree() >= 1)
        for (const auto& c : cluster_roots(d, poly_roots(d, tol), tol)) out.add(P1::finite(c.z), -c.multiplicity, merge);
    out.add(P1::infinity(), d.degree() - n.degree(), merge);
    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference Jacobian

struct JacobianReport {
    Eigen::MatrixXd jacobian;      // Richardson-extrapolated
    Eigen::MatrixXd coarse;        // central differences with step h
    Eigen::MatrixXd fine;          // central differences with step h/2
    Eigen::VectorXd singular_values;
    double richardson_gap = 0;     // max |coarse - fine|
    int rank = 0;
};

using RealMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline JacobianReport finite_diff_jacobian(const RealMap& f, const Eigen::VectorXd& x, double h = 1e-5,
                                           double rank_tol = 1e-6) {
    if (!(h > 0)) throw InvalidInput("finite_diff_jacobian: step must be positive");
    auto eval = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd v = f(p);
        if (!v.allFinite()) throw NumericRejection("nan", "non-finite value during differentiation");
        return v;
    };
    const Eigen::VectorXd f0 = eval(x);
    const auto m = f0.size(), k = x.size();
    auto central = [&](double step) {
        Eigen::MatrixXd j(m, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            j.col(i) = (eval(xp) - eval(xm)) / (2 * step);
        }
        return j;
    };
    JacobianReport r;
    r.coarse = central(h);
    r.fine = central(h / 2);
    r.jacobian = (4 * r.fine - r.coarse) / 3;
    r.richardson_gap = (r.coarse - r.fine).cwiseAbs().maxCoeff();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.jacobian);
    r.singular_values = svd.singularValues();
    const double top = r.singular_values.size() ? r.singular_values[0] : 0.0;
    for (Eigen::Index i = 0; i < r.singular_values.size(); ++i)
        if (r.singular_values[i] > rank_tol * top) ++r.rank;
    return r;
}

} // namespace dunce
