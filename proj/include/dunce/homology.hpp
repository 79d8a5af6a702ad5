#pragma once

// Integer chain complexes of (semi-simplicial / triangulated) sets, homology
// via Smith normal form, and the geometric barycentric subdivision.

#include <map>
#include <string>
#include <vector>

#include "dunce/simplicial.hpp"
#include "dunce/smith.hpp"

namespace dunce {

struct IntegerChainComplex {
    std::vector<std::size_t> ranks;
    /// boundary[n] : C_n -> C_{n-1}, shape ranks[n-1] x ranks[n]; boundary[0] is empty.
    std::vector<IntMatrix> boundary;

    int top_degree() const { return static_cast<int>(ranks.size()) - 1; }

    /// Throws if some composite of consecutive boundaries is nonzero.
    void check_square_zero() const {
        for (int n = 2; n <= top_degree(); ++n) {
            if (!(boundary[n - 1] * boundary[n]).is_zero())
                throw InvalidInput("boundary composite d_" + std::to_string(n - 1) + " d_" + std::to_string(n) +
                                   " is nonzero");
        }
    }
};

namespace detail {

inline int permutation_sign(const std::vector<int>& p) {
    int sign = 1;
    std::vector<bool> seen(p.size(), false);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) {
            seen[j] = true;
            ++len;
        }
        if (len % 2 == 0) sign = -sign;
    }
    return sign;
}

} // namespace detail

/// Chain complex on reduced facets. Each facet is oriented by its slot order;
/// a face enters with (-1)^k times the parity of the induced slot bijection.
inline IntegerChainComplex chain_complex(const TriangulatedSet& t) {
    require_valid(t, "chain_complex");
    IntegerChainComplex cc;
    for (int n = 0; n <= t.dimension(); ++n) cc.ranks.push_back(t.count(n));
    cc.boundary.resize(cc.ranks.size());
    for (int n = 1; n <= t.dimension(); ++n) {
        IntMatrix m(cc.ranks[n - 1], cc.ranks[n]);
        for (int x = 0; x < static_cast<int>(t.count(n)); ++x) {
            const auto& f = t.at(n, x);
            for (int k = 0; k <= n; ++k) {
                const auto& a = f.attach[k];
                std::vector<int> induced;
                for (int m2 = 0; m2 <= n; ++m2)
                    if (m2 != k) induced.push_back(a.injection[m2]);
                const int sign = (k % 2 == 0 ? 1 : -1) * detail::permutation_sign(induced);
                m(a.target, x) += sign;
            }
        }
        cc.boundary[n] = std::move(m);
    }
    cc.check_square_zero();
    return cc;
}

/// d_n = sum_k (-1)^k d_k.
inline IntegerChainComplex chain_complex(const SemiSimplicialSet& s) {
    require_valid(s, "chain_complex");
    IntegerChainComplex cc;
    for (int n = 0; n <= s.dimension(); ++n) cc.ranks.push_back(s.count(n));
    cc.boundary.resize(cc.ranks.size());
    for (int n = 1; n <= s.dimension(); ++n) {
        IntMatrix m(cc.ranks[n - 1], cc.ranks[n]);
        for (std::size_t x = 0; x < s.count(n); ++x)
            for (int k = 0; k <= n; ++k) m(s.faces[n][x][k], x) += (k % 2 == 0 ? 1 : -1);
        cc.boundary[n] = std::move(m);
    }
    cc.check_square_zero();
    return cc;
}

/// Restrict to the cells flagged present (a subcomplex).
inline IntegerChainComplex restrict_to(const IntegerChainComplex& cc, const std::vector<std::vector<bool>>& present) {
    IntegerChainComplex out;
    std::vector<std::vector<std::size_t>> keep(cc.ranks.size());
    for (std::size_t n = 0; n < cc.ranks.size(); ++n) {
        for (std::size_t i = 0; i < cc.ranks[n]; ++i)
            if (present[n][i]) keep[n].push_back(i);
        out.ranks.push_back(keep[n].size());
    }
    out.boundary.resize(cc.ranks.size());
    for (std::size_t n = 1; n < cc.ranks.size(); ++n) {
        IntMatrix m(keep[n - 1].size(), keep[n].size());
        for (std::size_t r = 0; r < keep[n - 1].size(); ++r)
            for (std::size_t c = 0; c < keep[n].size(); ++c) m(r, c) = cc.boundary[n](keep[n - 1][r], keep[n][c]);
        out.boundary[n] = std::move(m);
    }
    while (!out.ranks.empty() && out.ranks.back() == 0) {
        out.ranks.pop_back();
        out.boundary.pop_back();
    }
    return out;
}

struct HomologyGroup {
    long betti = 0;
    std::vector<BigInt> torsion;
    bool operator==(const HomologyGroup&) const = default;
    bool is_zero() const { return betti == 0 && torsion.empty(); }
};

inline std::vector<HomologyGroup> homology(const IntegerChainComplex& cc) {
    const int top = cc.top_degree();
    std::vector<std::size_t> rank(top + 2, 0);
    std::vector<std::vector<BigInt>> factors(top + 2);
    for (int n = 1; n <= top; ++n) {
        auto snf = smith_normal_form(cc.boundary[n]);
        rank[n] = snf.rank();
        factors[n] = snf.invariant_factors;
    }
    std::vector<HomologyGroup> h(top + 1);
    for (int n = 0; n <= top; ++n) {
        h[n].betti = static_cast<long>(cc.ranks[n]) - static_cast<long>(rank[n]) - static_cast<long>(rank[n + 1]);
        for (const auto& f : factors[n + 1])
            if (f > 1) h[n].torsion.push_back(f);
    }
    return h;
}

template <class Complex>
std::vector<HomologyGroup> homology(const Complex& c) {
    return homology(chain_complex(c));
}

/// Reduced homology: H_0 loses one free summand when the complex is non-empty.
inline std::vector<HomologyGroup> reduced(std::vector<HomologyGroup> h) {
    if (!h.empty() && h[0].betti > 0) h[0].betti -= 1;
    return h;
}

inline bool is_acyclic(const std::vector<HomologyGroup>& reduced_h) {
    for (const auto& g : reduced_h)
        if (!g.is_zero()) return false;
    return true;
}

inline long euler_from_betti(const std::vector<HomologyGroup>& h) {
    long chi = 0;
    for (std::size_t n = 0; n < h.size(); ++n) chi += (n % 2 == 0 ? 1 : -1) * h[n].betti;
    return chi;
}

// ---------------------------------------------------------------------------
// Barycentric subdivision

/// Geometric barycentric subdivision: every n-facet splits into (n+1)!
/// simplices. A k-simplex is a facet F with a strict chain of slot subsets
/// A_0 < ... < A_k = all slots of F; d_i drops A_i, and dropping the top
/// passes to the face spanned by A_{k-1}.
inline SemiSimplicialSet barycentric_subdivision(const TriangulatedSet& t) {
    require_valid(t, "barycentric_subdivision");
    using Key = std::pair<CellRef, std::vector<unsigned>>;
    std::vector<std::vector<Key>> simplices(t.dimension() + 1);
    for (int n = 0; n <= t.dimension(); ++n) {
        const unsigned full = (1u << (n + 1)) - 1;
        for (int x = 0; x < static_cast<int>(t.count(n)); ++x) {
            std::vector<unsigned> chain{full};
            auto grow = [&](auto&& self) -> void {
                std::vector<unsigned> asc(chain.rbegin(), chain.rend());
                simplices[chain.size() - 1].push_back({{n, x}, asc});
                const unsigned low = chain.back();
                for (unsigned sub = (low - 1) & low; sub != 0; sub = (sub - 1) & low) {
                    chain.push_back(sub);
                    self(self);
                    chain.pop_back();
                }
            };
            grow(grow);
        }
    }
    std::vector<std::map<Key, int>> index(simplices.size());
    for (std::size_t k = 0; k < simplices.size(); ++k) {
        std::sort(simplices[k].begin(), simplices[k].end());
        for (std::size_t i = 0; i < simplices[k].size(); ++i) index[k][simplices[k][i]] = static_cast<int>(i);
    }
    SemiSimplicialSet s;
    s.faces.resize(simplices.size());
    for (std::size_t k = 0; k < simplices.size(); ++k) {
        for (const auto& [cell, chain] : simplices[k]) {
            std::vector<int> f;
            if (k > 0) {
                for (std::size_t i = 0; i < k; ++i) {
                    auto sub = chain;
                    sub.erase(sub.begin() + static_cast<long>(i));
                    f.push_back(index[k - 1].at({cell, sub}));
                }
                std::vector<int> kept;
                for (int b = 0; b <= cell.dim; ++b)
                    if (chain[k - 1] & (1u << b)) kept.push_back(b);
                auto face = face_of(t, cell.dim, cell.id, kept);
                std::vector<unsigned> mapped;
                for (std::size_t i = 0; i < k; ++i) {
                    unsigned m = 0;
                    for (int b = 0; b <= cell.dim; ++b)
                        if (chain[i] & (1u << b)) m |= 1u << face.slot_map.at(b);
                    mapped.push_back(m);
                }
                f.push_back(index[k - 1].at({face.cell, mapped}));
            }
            s.faces[k].push_back(f);
        }
    }
    return s;
}

inline SemiSimplicialSet barycentric_subdivision(const SemiSimplicialSet& s) {
    return barycentric_subdivision(functor_p(s));
}

} // namespace dunce
