#pragma once

// Normal-crossing surface descriptions: strata with branch bookkeeping,
// the dual complex, Kulikov degrees, Euler characteristic of the generic
// fiber and the pi_1 verdict.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dunce/presentation.hpp"

namespace dunce {

/// A stratum of codimension k: k+1 branches of the normalization pass
/// through it. continuation[b] is the stratum of codimension k-1 obtained by
/// dropping branch b, with the remaining branches' positions there (-1 at b).
struct NCStratum {
    std::string name;
    std::vector<std::string> branches;
    std::vector<SlotAttachment> continuation;
    /// The branches do not switch when moving along the stratum. This is an
    /// input assumption; it holds automatically for simply connected strata.
    bool branch_trivial = true;

    // components
    std::optional<long> chi_normalization;

    // double curves: degrees c1(N(C; B1)), c1(N(C; B2)), triple point count,
    // and the number of points of the normalization lying over triple points
    // or nodes (used for the compactly supported Euler characteristic).
    std::optional<std::array<long, 2>> normal_degrees;
    std::optional<long> triple_points;
    std::optional<long> special_points;

    bool operator==(const NCStratum&) const = default;
};

struct NCSurfaceDescription {
    std::string name;
    /// strata[k] = strata of codimension k (components, double curves, triple points)
    std::vector<std::vector<NCStratum>> strata;

    std::size_t count(int k) const {
        return k >= 0 && k < static_cast<int>(strata.size()) ? strata[k].size() : 0;
    }
    bool operator==(const NCSurfaceDescription&) const = default;
};

namespace detail {

inline TriangulatedSet strata_as_tset(const NCSurfaceDescription& d) {
    TriangulatedSet t;
    t.facets.resize(d.strata.size());
    for (std::size_t k = 0; k < d.strata.size(); ++k)
        for (const auto& s : d.strata[k]) t.facets[k].push_back({s.continuation, {}});
    return t;
}

/// Number of slot attachments of codimension-2 strata landing on curve c.
inline long triple_point_incidences(const NCSurfaceDescription& d, int c) {
    long n = 0;
    for (const auto& tp : d.count(2) ? d.strata[2] : std::vector<NCStratum>{})
        for (const auto& a : tp.continuation)
            if (a.target == c) ++n;
    return n;
}

} // namespace detail

inline ValidationResult validate(const NCSurfaceDescription& d) {
    ValidationResult r;
    if (d.strata.empty() || d.strata.size() > 3) {
        r.problems.push_back("a surface description needs 1 to 3 strata levels");
        return r;
    }
    for (std::size_t k = 0; k < d.strata.size(); ++k) {
        for (std::size_t i = 0; i < d.strata[k].size(); ++i) {
            const auto& s = d.strata[k][i];
            const std::string where = "stratum " + std::to_string(k) + ":" + std::to_string(i) +
                                      (s.name.empty() ? "" : " (" + s.name + ")");
            if (s.branches.size() != k + 1)
                r.problems.push_back(where + " has " + std::to_string(s.branches.size()) + " branches, expected " +
                                     std::to_string(k + 1));
        }
    }
    if (!r.ok()) return r;
    auto t = detail::strata_as_tset(d);
    for (auto& p : validate(t).problems) r.problems.push_back("continuation maps: " + p);
    if (!r.ok()) return r;
    for (std::size_t c = 0; c < d.count(1); ++c) {
        const auto& s = d.strata[1][c];
        if (s.triple_points && *s.triple_points != detail::triple_point_incidences(d, static_cast<int>(c)))
            r.problems.push_back("double curve " + std::to_string(c) + " declares " + std::to_string(*s.triple_points) +
                                 " triple points but continuation maps give " +
                                 std::to_string(detail::triple_point_incidences(d, static_cast<int>(c))));
    }
    return r;
}

/// The dual complex: reduced facets are strata, slots are branches,
/// attachments are the continuation maps.
inline TriangulatedSet dual_complex(const NCSurfaceDescription& d) {
    require_valid(d, "dual_complex");
    for (std::size_t k = 0; k < d.strata.size(); ++k)
        for (const auto& s : d.strata[k])
            if (!s.branch_trivial)
                throw InvalidInput("dual_complex: stratum '" + s.name +
                                   "' has branch switching; the dual complex is not defined (the branches of a "
                                   "simply connected stratum never switch, but e.g. a curve with an involution "
                                   "exchanging its two branches does)");
    return detail::strata_as_tset(d);
}

// ---------------------------------------------------------------------------
// Builtin descriptions

namespace detail {

inline NCStratum component(std::string name, std::optional<long> chi = std::nullopt) {
    NCStratum s;
    s.name = std::move(name);
    s.branches = {"sheet"};
    s.chi_normalization = chi;
    return s;
}

} // namespace detail

/// Self-intersection number of the normalization of a plane nodal cubic in its
/// surface after the given number of blowups at its smooth points.
inline long nodal_cubic_normal_degree(long blowups) { return 9 - 2 - blowups; }

/// One component (P^2 blown up 9 times), one double curve (P glued to Q),
/// one triple point. Sheets at the triple point: 0 through the node of P,
/// 1 through the node of Q, 2 through the intersection point n; curve
/// branches are ordered (P side, Q side).
inline NCSurfaceDescription duncehat_surface_description() {
    NCSurfaceDescription d;
    d.name = "duncehat-surface";
    d.strata.resize(3);
    d.strata[0].push_back(detail::component("X", 3 + 9));
    NCStratum c;
    c.name = "C";
    c.branches = {"P", "Q"};
    c.continuation = {{0, {-1, 0}}, {0, {0, -1}}};
    c.normal_degrees = std::array<long, 2>{nodal_cubic_normal_degree(9), nodal_cubic_normal_degree(8)};
    c.triple_points = 3;
    c.chi_normalization = 2;
    c.special_points = 3;
    d.strata[1].push_back(c);
    NCStratum tp;
    tp.name = "t";
    tp.branches = {"pN", "qN", "n"};
    tp.continuation = {
        {0, {-1, 1, 0}}, // bQ1 = bPn: sheet 2 on the P side, sheet 1 on the Q side
        {0, {0, -1, 1}}, // bP2 = bQn: sheet 0 on the P side, sheet 2 on the Q side
        {0, {0, 1, -1}}, // bP1 = bQ2: sheet 0 on the P side, sheet 1 on the Q side
    };
    d.strata[2].push_back(tp);
    return d;
}

/// P and Q smooth and meeting transversally in three points; the three
/// sheets at the triple point each carry one P branch and one Q branch.
inline NCSurfaceDescription wrong_case_surface_description() {
    NCSurfaceDescription d;
    d.name = "wrong-case";
    d.strata.resize(3);
    d.strata[0].push_back(detail::component("X"));
    NCStratum c;
    c.name = "C";
    c.branches = {"P", "Q"};
    c.continuation = {{0, {-1, 0}}, {0, {0, -1}}};
    c.triple_points = 3;
    c.chi_normalization = 2;
    c.special_points = 3;
    d.strata[1].push_back(c);
    NCStratum tp;
    tp.name = "t";
    tp.branches = {"n1", "n2", "n3"};
    tp.continuation = {{0, {-1, 0, 1}}, {0, {1, -1, 0}}, {0, {0, 1, -1}}};
    d.strata[2].push_back(tp);
    return d;
}

/// Three planes in general position: coordinate planes of C^3 compactified.
inline NCSurfaceDescription three_planes_description() {
    NCSurfaceDescription d;
    d.name = "three-planes";
    d.strata.resize(3);
    for (const char* n : {"A", "B", "C"}) d.strata[0].push_back(detail::component(n, 3));
    // lines AB, AC, BC with branches ordered by component index
    const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (auto [a, b] : pairs) {
        NCStratum l;
        l.name = std::string(1, static_cast<char>('A' + a)) + static_cast<char>('A' + b);
        l.branches = {std::string(1, static_cast<char>('A' + a)), std::string(1, static_cast<char>('A' + b))};
        l.continuation = {{b, {-1, 0}}, {a, {0, -1}}};
        l.triple_points = 1;
        l.chi_normalization = 2;
        l.special_points = 1;
        d.strata[1].push_back(l);
    }
    NCStratum tp;
    tp.name = "ABC";
    tp.branches = {"A", "B", "C"};
    tp.continuation = {{2, {-1, 0, 1}}, {1, {0, -1, 1}}, {0, {0, 1, -1}}};
    d.strata[2].push_back(tp);
    return d;
}

/// Two planes glued along a line, no triple points.
inline NCSurfaceDescription two_planes_description() {
    NCSurfaceDescription d;
    d.name = "two-planes";
    d.strata.resize(2);
    d.strata[0] = {detail::component("A", 3), detail::component("B", 3)};
    NCStratum l;
    l.name = "AB";
    l.branches = {"A", "B"};
    l.continuation = {{1, {-1, 0}}, {0, {0, -1}}};
    l.triple_points = 0;
    l.chi_normalization = 2;
    l.special_points = 0;
    d.strata[1].push_back(l);
    return d;
}

// ---------------------------------------------------------------------------
// Numerical checks

/// c1 of the pullback of T^1_X to the normalization of a double curve.
inline long kulikov_degree(long d1, long d2, long tau) { return d1 + d2 + tau; }

struct KulikovReport {
    std::string curve;
    long degree = 0;
    bool satisfied() const { return degree == 0; }
};

inline std::vector<KulikovReport> kulikov_degrees(const NCSurfaceDescription& d) {
    require_valid(d, "kulikov_degrees");
    std::vector<KulikovReport> out;
    for (const auto& c : d.count(1) ? d.strata[1] : std::vector<NCStratum>{}) {
        if (!c.normal_degrees || !c.triple_points)
            throw InvalidInput("kulikov_degrees: double curve '" + c.name + "' lacks normal degrees or triple points");
        out.push_back({c.name, kulikov_degree((*c.normal_degrees)[0], (*c.normal_degrees)[1], *c.triple_points)});
    }
    return out;
}

/// chi of the generic fiber = chi_c of the smooth locus of X:
/// sum of chi(components) minus chi of the gluing locus in the
/// normalization, which is two copies of each double curve's normalization
/// with the special points identified in pairs.
inline long generic_fiber_euler(const NCSurfaceDescription& d) {
    require_valid(d, "generic_fiber_euler");
    long chi = 0;
    for (const auto& s : d.strata[0]) {
        if (!s.chi_normalization) throw InvalidInput("generic_fiber_euler: component '" + s.name + "' lacks chi");
        chi += *s.chi_normalization;
    }
    for (const auto& c : d.count(1) ? d.strata[1] : std::vector<NCStratum>{}) {
        if (!c.chi_normalization || !c.special_points)
            throw InvalidInput("generic_fiber_euler: double curve '" + c.name + "' lacks chi bookkeeping");
        chi -= 2 * *c.chi_normalization - *c.special_points;
    }
    return chi;
}

struct NumericalInvariants {
    long h11 = 0;
    long c1_sq = 0;
    long c2 = 0;
};

/// Hodge and Chern numbers of the generic fiber from its Euler
/// characteristic. Only the profile h10 = h20 = 0 is implemented.
inline NumericalInvariants numerical_invariants(long chi, long h10, long h20) {
    if (chi < 0 || h10 < 0 || h20 < 0) throw InvalidInput("numerical_invariants: negative input");
    if (h10 != 0 || h20 != 0) throw Unsupported("unsupported Hodge profile (only h10 = h20 = 0)");
    NumericalInvariants n;
    n.c2 = chi;
    n.h11 = chi - 2;
    n.c1_sq = 12 - chi;
    return n;
}

// ---------------------------------------------------------------------------
// pi_1 verdict

struct Pi1Verdict {
    bool vanishes = false;
    std::vector<std::string> reasons;
    TietzeResult tietze;
    HomologyGroup abelianization;
};

/// pi_1 of the generic fiber vanishes when pi_1 of the dual complex is
/// certified trivial and every component's open part is declared simply
/// connected (component_flags[i] for component i).
inline Pi1Verdict pi1_vanishing_verdict(const NCSurfaceDescription& d, const std::vector<bool>& component_flags,
                                        const TietzeOptions& opt = {}) {
    auto t = dual_complex(d);
    Pi1Verdict v;
    auto ep = edge_path_presentation(t);
    v.abelianization = abelianization(ep.presentation);
    v.tietze = tietze_trivialize(ep.presentation, opt);
    bool ok = true;
    if (v.tietze.verdict != TietzeResult::Verdict::trivial) {
        ok = false;
        v.reasons.push_back("pi_1 of the dual complex is not certified trivial (" + v.tietze.note + ")");
    }
    if (component_flags.size() != d.strata[0].size()) {
        ok = false;
        v.reasons.push_back("expected " + std::to_string(d.strata[0].size()) + " component flags, got " +
                            std::to_string(component_flags.size()));
    } else {
        for (std::size_t i = 0; i < component_flags.size(); ++i)
            if (!component_flags[i]) {
                ok = false;
                v.reasons.push_back("component '" + d.strata[0][i].name +
                                    "': simple connectivity of the complement of the double locus is not asserted");
            }
    }
    v.vanishes = ok;
    if (ok) v.reasons.push_back("dual complex simply connected and all component hypotheses asserted");
    return v;
}

} // namespace dunce
