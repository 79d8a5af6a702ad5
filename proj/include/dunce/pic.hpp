#pragma once

// Degree-zero line bundles on a nodal curve with rational components, as
// gluing data modulo the action of the component scalings:
// Pic0 = prod_j (C*)^{m_j} / C*  modulo  im(q).

#include <cmath>
#include <complex>
#include <deque>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dunce/ncgeom.hpp"

namespace dunce {

/// Bipartite graph: components on one side, special points on the other.
/// Every edge is one preimage of a point on a component; a component through
/// the same point twice contributes two edges.
struct CurveIncidenceGraph {
    int components = 0;
    std::vector<int> multiplicity;
    /// edges[e] = (component, point)
    std::vector<std::pair<int, int>> edges;

    int points() const { return static_cast<int>(multiplicity.size()); }
    bool operator==(const CurveIncidenceGraph&) const = default;
};

inline ValidationResult validate(const CurveIncidenceGraph& g) {
    ValidationResult r;
    if (g.components < 0) r.problems.push_back("negative component count");
    std::vector<int> seen(g.multiplicity.size(), 0);
    for (auto [c, p] : g.edges) {
        if (c < 0 || c >= g.components || p < 0 || p >= g.points()) {
            r.problems.push_back("edge (" + std::to_string(c) + ", " + std::to_string(p) + ") out of range");
            continue;
        }
        ++seen[p];
    }
    for (int j = 0; j < g.points(); ++j) {
        if (g.multiplicity[j] < 2) r.problems.push_back("point " + std::to_string(j) + " has multiplicity < 2");
        if (seen[j] != g.multiplicity[j])
            r.problems.push_back("point " + std::to_string(j) + " has " + std::to_string(seen[j]) +
                                 " incident branches, expected " + std::to_string(g.multiplicity[j]));
    }
    return r;
}

struct PicTorus {
    int ambient_rank = 0;
    int points = 0;
    int components = 0;
    int connected_components = 0;
    int dimension = 0;
};

namespace detail {

/// Nodes 0..k-1 are components, k..k+s-1 are points.
inline std::vector<int> incidence_component_labels(const CurveIncidenceGraph& g) {
    const int n = g.components + g.points();
    std::vector<std::vector<int>> adj(n);
    for (auto [c, p] : g.edges) {
        adj[c].push_back(g.components + p);
        adj[g.components + p].push_back(c);
    }
    std::vector<int> label(n, -1);
    int next = 0;
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        std::deque<int> q{s};
        label[s] = next;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int w : adj[v])
                if (label[w] < 0) {
                    label[w] = next;
                    q.push_back(w);
                }
        }
        ++next;
    }
    return label;
}

} // namespace detail

inline PicTorus pic0_structure(const CurveIncidenceGraph& g) {
    require_valid(g, "pic0_structure");
    PicTorus t;
    t.ambient_rank = static_cast<int>(g.edges.size());
    t.points = g.points();
    t.components = g.components;
    auto labels = detail::incidence_component_labels(g);
    t.connected_components = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    int sum = 0;
    for (int m : g.multiplicity) sum += m - 1;
    t.dimension = sum - g.components + t.connected_components;
    return t;
}

/// The curve formed by the double locus: components are the double
/// curves' normalizations, points are the triple points, and every slot of
/// a triple point is one preimage on the curve it continues to.
inline CurveIncidenceGraph double_locus_graph(const NCSurfaceDescription& d) {
    require_valid(d, "double_locus_graph");
    CurveIncidenceGraph g;
    g.components = static_cast<int>(d.count(1));
    for (std::size_t j = 0; j < d.count(2); ++j) {
        const auto& tp = d.strata[2][j];
        g.multiplicity.push_back(static_cast<int>(tp.continuation.size()));
        for (const auto& a : tp.continuation) g.edges.push_back({a.target, static_cast<int>(j)});
    }
    return g;
}

/// One gluing value per edge, modulo point and component scalings.
template <class Scalar>
struct PicClass {
    std::vector<Scalar> values;
};

using NumericPicClass = PicClass<std::complex<double>>;
using ExactPicClass = PicClass<boost::multiprecision::cpp_rational>;

/// Canonical representative: along a BFS spanning forest of the incidence
/// graph (roots and edges taken in id order) the tree edges are gauged to
/// exactly 1; the remaining entries are then invariants of the class.
template <class Scalar>
PicClass<Scalar> pic_normalize(const CurveIncidenceGraph& g, const std::vector<Scalar>& raw) {
    require_valid(g, "pic_normalize");
    if (raw.size() != g.edges.size())
        throw InvalidInput("pic_normalize: expected " + std::to_string(g.edges.size()) + " values, got " +
                           std::to_string(raw.size()));
    for (const auto& v : raw)
        if (v == Scalar(0)) throw InvalidInput("pic_normalize: gluing values must be nonzero");
    const int n = g.components + g.points();
    std::vector<std::vector<std::pair<int, int>>> adj(n); // (neighbour, edge)
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        auto [c, p] = g.edges[e];
        adj[c].push_back({g.components + p, e});
        adj[g.components + p].push_back({c, e});
    }
    std::vector<Scalar> scale(n, Scalar(1));
    std::vector<bool> done(n, false);
    for (int s = 0; s < n; ++s) {
        if (done[s]) continue;
        done[s] = true;
        std::deque<int> q{s};
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (auto [w, e] : adj[v]) {
                if (done[w]) continue;
                done[w] = true;
                scale[w] = Scalar(1) / (raw[e] * scale[v]);
                q.push_back(w);
            }
        }
    }
    PicClass<Scalar> out;
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        auto [c, p] = g.edges[e];
        out.values.push_back(raw[e] * scale[c] * scale[g.components + p]);
    }
    return out;
}

template <class Scalar>
PicClass<Scalar> pic_mul(const CurveIncidenceGraph& g, const PicClass<Scalar>& a, const PicClass<Scalar>& b) {
    if (a.values.size() != b.values.size()) throw InvalidInput("pic_mul: size mismatch");
    std::vector<Scalar> v(a.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] * b.values[i];
    return pic_normalize(g, v);
}

template <class Scalar>
PicClass<Scalar> pic_inverse(const CurveIncidenceGraph& g, const PicClass<Scalar>& a) {
    std::vector<Scalar> v;
    for (const auto& x : a.values) v.push_back(Scalar(1) / x);
    return pic_normalize(g, v);
}

/// Numeric comparison in log coordinates (relative tolerance on each entry).
inline bool pic_is_trivial(const NumericPicClass& a, double tol = 1e-9) {
    for (const auto& v : a.values)
        if (std::abs(std::log(v)) > tol) return false;
    return true;
}

inline bool pic_is_trivial(const ExactPicClass& a) {
    for (const auto& v : a.values)
        if (v != 1) return false;
    return true;
}

inline bool pic_equal(const NumericPicClass& a, const NumericPicClass& b, double tol = 1e-9) {
    if (a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (std::abs(std::log(a.values[i] / b.values[i])) > tol) return false;
    return true;
}

} // namespace dunce
