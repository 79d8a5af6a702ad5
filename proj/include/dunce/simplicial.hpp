#pragma once

// Semi-simplicial sets and triangulated sets.
//
// A triangulated set is stored by its reduced facets: every n-facet carries
// n+1 slots, and deleting slot k lands on a reduced (n-1)-facet together with
// a bijection of the remaining slots onto the target's slots. The full functor
// on finite sets is recovered as (facet, ordering of slots).

#include <algorithm>
#include <bit>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dunce/errors.hpp"

namespace dunce {

struct ValidationResult {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

// ---------------------------------------------------------------------------
// SemiSimplicialSet

struct SemiSimplicialSet {
    /// faces[n][x][k] = id of the (n-1)-simplex obtained by deleting vertex k
    /// of the n-simplex x. faces[0] holds one empty entry per vertex.
    std::vector<std::vector<std::vector<int>>> faces;

    int dimension() const { return static_cast<int>(faces.size()) - 1; }
    std::size_t count(int n) const {
        return n >= 0 && n < static_cast<int>(faces.size()) ? faces[n].size() : 0;
    }
    std::vector<std::size_t> counts() const {
        std::vector<std::size_t> c;
        for (const auto& level : faces) c.push_back(level.size());
        return c;
    }
    bool operator==(const SemiSimplicialSet&) const = default;
};

inline ValidationResult validate(const SemiSimplicialSet& s) {
    ValidationResult r;
    for (int n = 0; n <= s.dimension(); ++n) {
        for (std::size_t x = 0; x < s.faces[n].size(); ++x) {
            const auto& f = s.faces[n][x];
            const std::size_t want = n == 0 ? 0 : static_cast<std::size_t>(n + 1);
            if (f.size() != want) {
                r.problems.push_back("simplex " + std::to_string(n) + ":" + std::to_string(x) +
                                     " has " + std::to_string(f.size()) + " faces, expected " +
                                     std::to_string(want));
                continue;
            }
            for (int id : f) {
                if (id < 0 || static_cast<std::size_t>(id) >= s.count(n - 1)) {
                    r.problems.push_back("simplex " + std::to_string(n) + ":" + std::to_string(x) +
                                         " references missing face " + std::to_string(id));
                }
            }
        }
    }
    if (!r.ok()) return r;
    // d_i d_j = d_{j-1} d_i for i < j
    for (int n = 2; n <= s.dimension(); ++n) {
        for (std::size_t x = 0; x < s.faces[n].size(); ++x) {
            for (int j = 1; j <= n; ++j) {
                for (int i = 0; i < j; ++i) {
                    const int lhs = s.faces[n - 1][s.faces[n][x][j]][i];
                    const int rhs = s.faces[n - 1][s.faces[n][x][i]][j - 1];
                    if (lhs != rhs) {
                        r.problems.push_back("semi-simplicial identity fails at simplex " +
                                             std::to_string(n) + ":" + std::to_string(x) + " (i=" +
                                             std::to_string(i) + ", j=" + std::to_string(j) + ")");
                    }
                }
            }
        }
    }
    return r;
}

template <class Complex>
long euler_characteristic(const Complex& c) {
    long chi = 0;
    for (int n = 0; n <= c.dimension(); ++n) chi += (n % 2 == 0 ? 1 : -1) * static_cast<long>(c.count(n));
    return chi;
}

// ---------------------------------------------------------------------------
// TriangulatedSet

struct SlotAttachment {
    int target = -1;
    /// injection[m] = slot of the target that slot m lands on; -1 at the
    /// deleted slot itself.
    std::vector<int> injection;
    bool operator==(const SlotAttachment&) const = default;
};

using Ordering = std::vector<int>;

struct ReducedFacet {
    /// attach[k] for k = 0..n; empty for vertices.
    std::vector<SlotAttachment> attach;
    /// Declared slot permutations under which orderings of this facet are
    /// identified. Non-empty means the facet is a quotient and the functor is
    /// not free; kept so that such inputs can be represented and rejected.
    std::vector<Ordering> stabilizer;
    bool operator==(const ReducedFacet&) const = default;
};

struct TriangulatedSet {
    std::vector<std::vector<ReducedFacet>> facets;

    int dimension() const { return static_cast<int>(facets.size()) - 1; }
    std::size_t count(int n) const {
        return n >= 0 && n < static_cast<int>(facets.size()) ? facets[n].size() : 0;
    }
    std::vector<std::size_t> counts() const {
        std::vector<std::size_t> c;
        for (const auto& level : facets) c.push_back(level.size());
        return c;
    }
    const ReducedFacet& at(int n, int id) const { return facets.at(n).at(id); }
    bool operator==(const TriangulatedSet&) const = default;
};

struct CellRef {
    int dim = 0;
    int id = 0;
    auto operator<=>(const CellRef&) const = default;
};

/// Result of iterated slot deletion: the face spanned by a subset of slots,
/// and where each kept slot ends up among the face's slots.
struct FaceImage {
    CellRef cell;
    std::map<int, int> slot_map;
};

inline bool is_permutation_of_slots(const Ordering& o, std::size_t n) {
    if (o.size() != n) return false;
    std::vector<int> s = o;
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < n; ++i)
        if (s[i] != static_cast<int>(i)) return false;
    return true;
}

namespace detail {

inline void check_attachment_shape(const TriangulatedSet& t, ValidationResult& r) {
    for (int n = 0; n <= t.dimension(); ++n) {
        for (std::size_t x = 0; x < t.facets[n].size(); ++x) {
            const auto& f = t.facets[n][x];
            const std::string where = "facet " + std::to_string(n) + ":" + std::to_string(x);
            const std::size_t want = n == 0 ? 0 : static_cast<std::size_t>(n + 1);
            if (f.attach.size() != want) {
                r.problems.push_back(where + " has " + std::to_string(f.attach.size()) +
                                     " slot attachments, expected " + std::to_string(want));
                continue;
            }
            for (int k = 0; k < static_cast<int>(f.attach.size()); ++k) {
                const auto& a = f.attach[k];
                if (a.target < 0 || static_cast<std::size_t>(a.target) >= t.count(n - 1)) {
                    r.problems.push_back(where + " slot " + std::to_string(k) +
                                         " attaches to missing facet " + std::to_string(a.target));
                    continue;
                }
                if (a.injection.size() != static_cast<std::size_t>(n + 1) || a.injection[k] != -1) {
                    r.problems.push_back(where + " slot " + std::to_string(k) + " has malformed injection");
                    continue;
                }
                std::vector<int> img;
                for (int m = 0; m <= n; ++m)
                    if (m != k) img.push_back(a.injection[m]);
                if (!is_permutation_of_slots(img, static_cast<std::size_t>(n))) {
                    r.problems.push_back(where + " slot " + std::to_string(k) +
                                         " injection is not a bijection onto the target's slots");
                }
            }
            for (const auto& s : f.stabilizer) {
                if (!is_permutation_of_slots(s, static_cast<std::size_t>(n + 1)))
                    r.problems.push_back(where + " declares a stabilizer entry that is not a slot permutation");
            }
        }
    }
}

} // namespace detail

/// Face of facet (dim, id) spanned by the slots in `kept` (non-empty).
/// Requires a shape-valid set.
inline FaceImage face_of(const TriangulatedSet& t, int dim, int id, const std::vector<int>& kept) {
    FaceImage out{{dim, id}, {}};
    for (int s : kept) out.slot_map[s] = s;
    while (out.cell.dim + 1 > static_cast<int>(kept.size())) {
        std::set<int> used;
        for (auto& [orig, cur] : out.slot_map) used.insert(cur);
        int k = 0;
        while (used.count(k)) ++k;
        const auto& a = t.at(out.cell.dim, out.cell.id).attach.at(k);
        for (auto& [orig, cur] : out.slot_map) cur = a.injection.at(cur);
        out.cell = {out.cell.dim - 1, a.target};
    }
    return out;
}

inline ValidationResult validate(const TriangulatedSet& t) {
    ValidationResult r;
    detail::check_attachment_shape(t, r);
    if (!r.ok()) return r;
    // coherence: deleting slots k and l in either order agrees
    for (int n = 2; n <= t.dimension(); ++n) {
        for (int x = 0; x < static_cast<int>(t.facets[n].size()); ++x) {
            const auto& f = t.facets[n][x];
            for (int k = 0; k <= n; ++k) {
                for (int l = k + 1; l <= n; ++l) {
                    auto via = [&](int first, int second) {
                        const auto& a = f.attach[first];
                        const int second_img = a.injection[second];
                        const auto& b = t.facets[n - 1][a.target].attach[second_img];
                        std::map<int, int> comp;
                        for (int m = 0; m <= n; ++m)
                            if (m != k && m != l) comp[m] = b.injection[a.injection[m]];
                        return std::make_pair(b.target, comp);
                    };
                    if (via(k, l) != via(l, k)) {
                        r.problems.push_back("facet " + std::to_string(n) + ":" + std::to_string(x) +
                                             " is incoherent: deleting slots " + std::to_string(k) +
                                             " and " + std::to_string(l) + " in different orders disagrees");
                    }
                }
            }
        }
    }
    // freeness
    for (int n = 0; n <= t.dimension(); ++n) {
        for (int x = 0; x < static_cast<int>(t.facets[n].size()); ++x) {
            const auto& f = t.facets[n][x];
            for (const auto& sigma : f.stabilizer) {
                bool identity = true;
                for (int i = 0; i <= n; ++i) identity = identity && sigma[i] == i;
                if (identity) continue;
                bool fixes = true;
                for (int k = 0; k < static_cast<int>(f.attach.size()) && fixes; ++k) {
                    const auto& a = f.attach[k];
                    const auto& b = f.attach[sigma[k]];
                    if (a.target != b.target) fixes = false;
                    for (int m = 0; m <= n && fixes; ++m)
                        if (m != k && b.injection[sigma[m]] != a.injection[m]) fixes = false;
                }
                const std::string where = "facet " + std::to_string(n) + ":" + std::to_string(x);
                if (!fixes)
                    r.problems.push_back(where + " declares a stabilizer that does not preserve its attaching data");
                else
                    r.problems.push_back(where + " has a nontrivial slot symmetry fixing its attaching data "
                                                 "(action on orderings is not free)");
            }
        }
    }
    return r;
}

template <class Complex>
void require_valid(const Complex& c, const char* what) {
    auto r = validate(c);
    if (!r.ok()) throw InvalidInput(std::string(what) + ": " + r.problems.front());
}

// ---------------------------------------------------------------------------
// Builtins

/// One vertex, one edge, one triangle; every face map hits the unique cell.
inline SemiSimplicialSet make_duncehat() {
    SemiSimplicialSet s;
    s.faces = {{{}}, {{0, 0}}, {{0, 0, 0}}};
    return s;
}

/// The standard n-simplex as a semi-simplicial set (all faces distinct).
inline SemiSimplicialSet make_simplex(int n) {
    SemiSimplicialSet s;
    s.faces.resize(n + 1);
    // simplices are non-empty subsets of {0..n}, encoded as bitmasks
    std::vector<std::vector<unsigned>> by_dim(n + 1);
    for (unsigned mask = 1; mask < (1u << (n + 1)); ++mask) by_dim[std::popcount(mask) - 1].push_back(mask);
    std::vector<std::map<unsigned, int>> index(n + 1);
    for (int d = 0; d <= n; ++d)
        for (std::size_t i = 0; i < by_dim[d].size(); ++i) index[d][by_dim[d][i]] = static_cast<int>(i);
    for (int d = 0; d <= n; ++d) {
        for (unsigned mask : by_dim[d]) {
            std::vector<int> f;
            if (d > 0) {
                std::vector<int> bits;
                for (int b = 0; b <= n; ++b)
                    if (mask & (1u << b)) bits.push_back(b);
                for (int k = 0; k <= d; ++k) f.push_back(index[d - 1][mask & ~(1u << bits[k])]);
            }
            s.faces[d].push_back(f);
        }
    }
    return s;
}

/// Boundary of the 3-simplex: a 2-sphere.
inline SemiSimplicialSet make_tetrahedron_boundary() {
    auto s = make_simplex(3);
    s.faces.pop_back();
    return s;
}

/// k vertices joined in a cycle by k edges (edge i runs from vertex i to i+1).
inline SemiSimplicialSet make_cycle_graph(int k) {
    SemiSimplicialSet s;
    s.faces.resize(2);
    s.faces[0].assign(k, {});
    for (int i = 0; i < k; ++i) {
        int a = i, b = (i + 1) % k;
        if (a < b)
            s.faces[1].push_back({b, a});
        else
            s.faces[1].push_back({a, b});
    }
    return s;
}

/// Two triangles on vertices a<b<c sharing the edges ab and bc but with
/// distinct ac edges.
inline SemiSimplicialSet make_two_triangles_sharing_two_edges() {
    SemiSimplicialSet s;
    // vertices a=0 b=1 c=2; edges ab=0 bc=1 ac=2 ac'=3
    s.faces = {{{}, {}, {}}, {{1, 0}, {2, 1}, {2, 0}, {2, 0}}, {{1, 2, 0}, {1, 3, 0}}};
    return s;
}

namespace detail {
inline std::vector<int> skip_injection(int n, int k) {
    std::vector<int> inj(n + 1);
    for (int m = 0; m <= n; ++m) inj[m] = m == k ? -1 : (m < k ? m : m - 1);
    return inj;
}
} // namespace detail

/// Triangle whose edges [01], [12], [20] are glued to one edge, each with
/// its own orientation.
inline TriangulatedSet make_cyclic_triangle() {
    TriangulatedSet t;
    t.facets.resize(3);
    t.facets[0].push_back({});
    t.facets[1].push_back({{{0, {-1, 0}}, {0, {0, -1}}}, {}});
    ReducedFacet tri;
    tri.attach = {
        {0, {-1, 0, 1}}, // edge [12]: 1 -> 0, 2 -> 1
        {0, {1, -1, 0}}, // edge [20]: 2 -> 0, 0 -> 1
        {0, {0, 1, -1}}, // edge [01]: 0 -> 0, 1 -> 1
    };
    t.facets[2].push_back(tri);
    return t;
}

// ---------------------------------------------------------------------------
// Functors

/// p(S): one reduced facet per simplex; slot k is vertex k, and deleting it
/// follows the face map with the order-preserving relabelling.
inline TriangulatedSet functor_p(const SemiSimplicialSet& s) {
    require_valid(s, "functor_p");
    TriangulatedSet t;
    t.facets.resize(s.faces.size());
    for (int n = 0; n <= s.dimension(); ++n) {
        for (const auto& f : s.faces[n]) {
            ReducedFacet r;
            for (int k = 0; k < static_cast<int>(f.size()); ++k) r.attach.push_back({f[k], detail::skip_injection(n, k)});
            t.facets[n].push_back(std::move(r));
        }
    }
    return t;
}

/// All faces of (dim, id) including itself.
inline std::set<CellRef> all_faces(const TriangulatedSet& t, int dim, int id) {
    std::set<CellRef> out;
    const int slots = dim + 1;
    for (unsigned mask = 1; mask < (1u << slots); ++mask) {
        std::vector<int> kept;
        for (int b = 0; b < slots; ++b)
            if (mask & (1u << b)) kept.push_back(b);
        out.insert(face_of(t, dim, id, kept).cell);
    }
    return out;
}

/// q(T): n-simplices are flags a_0 < ... < a_n of reduced facets of strictly
/// increasing dimension, ordered by the face relation; d_k deletes entry k.
inline SemiSimplicialSet functor_q(const TriangulatedSet& t) {
    require_valid(t, "functor_q");
    std::vector<CellRef> cells;
    for (int n = 0; n <= t.dimension(); ++n)
        for (int x = 0; x < static_cast<int>(t.count(n)); ++x) cells.push_back({n, x});
    std::map<CellRef, std::set<CellRef>> below;
    for (auto c : cells) {
        auto f = all_faces(t, c.dim, c.id);
        f.erase(c);
        below[c] = std::move(f);
    }
    std::vector<std::vector<std::vector<CellRef>>> flags(cells.empty() ? 0 : t.dimension() + 1);
    std::vector<CellRef> chain;
    auto extend = [&](auto&& self) -> void {
        flags[chain.size() - 1].push_back(chain);
        for (auto c : cells) {
            if (c.dim > chain.back().dim && below[c].count(chain.back())) {
                chain.push_back(c);
                self(self);
                chain.pop_back();
            }
        }
    };
    for (auto c : cells) {
        chain = {c};
        extend(extend);
    }
    while (!flags.empty() && flags.back().empty()) flags.pop_back();
    std::vector<std::map<std::vector<CellRef>, int>> index(flags.size());
    for (std::size_t n = 0; n < flags.size(); ++n) {
        std::sort(flags[n].begin(), flags[n].end());
        for (std::size_t i = 0; i < flags[n].size(); ++i) index[n][flags[n][i]] = static_cast<int>(i);
    }
    SemiSimplicialSet s;
    s.faces.resize(flags.size());
    for (std::size_t n = 0; n < flags.size(); ++n) {
        for (const auto& fl : flags[n]) {
            std::vector<int> f;
            if (n > 0) {
                for (std::size_t k = 0; k <= n; ++k) {
                    auto sub = fl;
                    sub.erase(sub.begin() + static_cast<long>(k));
                    f.push_back(index[n - 1].at(sub));
                }
            }
            s.faces[n].push_back(f);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Simplicity

/// No facet has two coinciding faces of the same dimension.
inline bool is_simple(const TriangulatedSet& t) {
    for (int n = 1; n <= t.dimension(); ++n) {
        for (int x = 0; x < static_cast<int>(t.count(n)); ++x) {
            std::map<int, std::set<int>> seen;
            const int slots = n + 1;
            for (unsigned mask = 1; mask + 1 < (1u << slots); ++mask) {
                std::vector<int> kept;
                for (int b = 0; b < slots; ++b)
                    if (mask & (1u << b)) kept.push_back(b);
                auto c = face_of(t, n, x, kept).cell;
                if (!seen[c.dim].insert(c.id).second) return false;
            }
        }
    }
    return true;
}

/// Simple, and any two facets meet in the empty set or in one maximal common face.
inline bool is_strictly_simple(const TriangulatedSet& t) {
    if (!is_simple(t)) return false;
    std::vector<std::pair<CellRef, std::set<CellRef>>> closure;
    for (int n = 0; n <= t.dimension(); ++n)
        for (int x = 0; x < static_cast<int>(t.count(n)); ++x) closure.push_back({{n, x}, all_faces(t, n, x)});
    std::map<CellRef, std::set<CellRef>> faces_of;
    for (auto& [c, f] : closure) faces_of[c] = f;
    for (std::size_t i = 0; i < closure.size(); ++i) {
        for (std::size_t j = i + 1; j < closure.size(); ++j) {
            std::vector<CellRef> common;
            std::set_intersection(closure[i].second.begin(), closure[i].second.end(), closure[j].second.begin(),
                                  closure[j].second.end(), std::back_inserter(common));
            if (common.empty()) continue;
            int maximal = 0;
            for (auto c : common) {
                bool is_max = true;
                for (auto d : common)
                    if (d != c && faces_of[d].count(c)) is_max = false;
                if (is_max) ++maximal;
            }
            if (maximal != 1) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Lifting to a semi-simplicial set, isomorphism

namespace detail {

inline std::vector<Ordering> all_permutations(int n) {
    std::vector<Ordering> out;
    Ordering p(n);
    std::iota(p.begin(), p.end(), 0);
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

} // namespace detail

/// Whether some choice of slot ordering per facet turns every attachment into
/// an order-preserving face map, i.e. T = p(S) for a semi-simplicial set S.
/// Exhaustive backtracking; intended for small complexes.
inline bool has_semisimplicial_lift(const TriangulatedSet& t) {
    require_valid(t, "has_semisimplicial_lift");
    // order[n][x][slot] = position of that slot in the chosen ordering
    std::vector<std::vector<Ordering>> order(t.facets.size());
    for (int n = 0; n <= t.dimension(); ++n) order[n].resize(t.count(n));
    std::vector<CellRef> queue;
    for (int n = 0; n <= t.dimension(); ++n)
        for (int x = 0; x < static_cast<int>(t.count(n)); ++x) queue.push_back({n, x});
    auto consistent = [&](CellRef c) {
        const auto& f = t.at(c.dim, c.id);
        const auto& mine = order[c.dim][c.id];
        for (int k = 0; k < static_cast<int>(f.attach.size()); ++k) {
            const auto& a = f.attach[k];
            const auto& theirs = order[c.dim - 1][a.target];
            // remaining slots, in my order, must map to increasing positions in theirs
            std::vector<std::pair<int, int>> seq;
            for (int m = 0; m <= c.dim; ++m)
                if (m != k) seq.push_back({mine[m], theirs[a.injection[m]]});
            std::sort(seq.begin(), seq.end());
            for (std::size_t i = 0; i < seq.size(); ++i)
                if (seq[i].second != static_cast<int>(i)) return false;
        }
        return true;
    };
    auto search = [&](auto&& self, std::size_t i) -> bool {
        if (i == queue.size()) return true;
        auto c = queue[i];
        for (auto& p : detail::all_permutations(c.dim + 1)) {
            order[c.dim][c.id] = p;
            if (c.dim == 0 || consistent(c))
                if (self(self, i + 1)) return true;
        }
        return false;
    };
    return search(search, 0);
}

/// Backtracking isomorphism test: bijections of reduced facets per dimension
/// together with slot permutations that commute with all attachments.
inline bool are_isomorphic(const TriangulatedSet& a, const TriangulatedSet& b) {
    if (a.counts() != b.counts()) return false;
    std::vector<CellRef> queue;
    for (int n = 0; n <= a.dimension(); ++n)
        for (int x = 0; x < static_cast<int>(a.count(n)); ++x) queue.push_back({n, x});
    std::vector<std::vector<int>> image(a.facets.size());
    std::vector<std::vector<Ordering>> slot_perm(a.facets.size());
    std::vector<std::vector<bool>> used(a.facets.size());
    for (int n = 0; n <= a.dimension(); ++n) {
        image[n].assign(a.count(n), -1);
        slot_perm[n].resize(a.count(n));
        used[n].assign(a.count(n), false);
    }
    auto consistent = [&](CellRef c) {
        const auto& fa = a.at(c.dim, c.id);
        const auto& fb = b.at(c.dim, image[c.dim][c.id]);
        const auto& sigma = slot_perm[c.dim][c.id];
        for (int k = 0; k < static_cast<int>(fa.attach.size()); ++k) {
            const auto& at = fa.attach[k];
            const auto& bt = fb.attach[sigma[k]];
            if (image[c.dim - 1][at.target] != bt.target) return false;
            const auto& tau = slot_perm[c.dim - 1][at.target];
            for (int m = 0; m <= c.dim; ++m)
                if (m != k && tau[at.injection[m]] != bt.injection[sigma[m]]) return false;
        }
        return true;
    };
    auto search = [&](auto&& self, std::size_t i) -> bool {
        if (i == queue.size()) return true;
        auto c = queue[i];
        for (int y = 0; y < static_cast<int>(b.count(c.dim)); ++y) {
            if (used[c.dim][y]) continue;
            used[c.dim][y] = true;
            image[c.dim][c.id] = y;
            for (auto& p : detail::all_permutations(c.dim + 1)) {
                slot_perm[c.dim][c.id] = p;
                if ((c.dim == 0 || consistent(c)) && self(self, i + 1)) return true;
            }
            used[c.dim][y] = false;
        }
        image[c.dim][c.id] = -1;
        return false;
    };
    return search(search, 0);
}

} // namespace dunce
