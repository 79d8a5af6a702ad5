#pragma once

// Free faces and exhaustive collapsibility search on CW-style incidence
// (faces counted with multiplicity).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "dunce/homology.hpp"

namespace dunce {

struct FreePair {
    CellRef face;
    CellRef coface;
    auto operator<=>(const FreePair&) const = default;
};

struct CollapseCertificate {
    enum class Kind { collapsible, non_collapsible, inconclusive };
    Kind kind = Kind::inconclusive;
    /// Elementary collapses in order (only for collapsible).
    std::vector<FreePair> moves;
    /// Number of distinct complexes visited by the search.
    std::size_t nodes = 0;
};

inline const char* to_string(CollapseCertificate::Kind k) {
    switch (k) {
    case CollapseCertificate::Kind::collapsible: return "collapsible";
    case CollapseCertificate::Kind::non_collapsible: return "non_collapsible";
    case CollapseCertificate::Kind::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace detail {

/// Flat indexing of all reduced facets with codimension-one incidences.
class IncidenceTable {
public:
    explicit IncidenceTable(const TriangulatedSet& t) {
        require_valid(t, "collapse");
        for (int n = 0; n <= t.dimension(); ++n) {
            offset_.push_back(cells_.size());
            for (int x = 0; x < static_cast<int>(t.count(n)); ++x) cells_.push_back({n, x});
        }
        cofaces_.resize(cells_.size());
        for (std::size_t c = 0; c < cells_.size(); ++c) {
            auto [n, x] = cells_[c];
            if (n == 0) continue;
            for (const auto& a : t.at(n, x).attach) {
                auto& list = cofaces_[flat({n - 1, a.target})];
                bool merged = false;
                for (auto& [cf, mult] : list)
                    if (cf == c) {
                        ++mult;
                        merged = true;
                    }
                if (!merged) list.push_back({c, 1});
            }
        }
    }

    std::size_t size() const { return cells_.size(); }
    CellRef cell(std::size_t i) const { return cells_[i]; }
    std::size_t flat(CellRef c) const { return offset_[c.dim] + static_cast<std::size_t>(c.id); }

    /// Free pairs among present cells, in lexicographic order of (face, coface).
    std::vector<std::pair<std::size_t, std::size_t>> free_pairs(const std::vector<bool>& present) const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t f = 0; f < cells_.size(); ++f) {
            if (!present[f]) continue;
            int total = 0;
            std::size_t only = 0;
            for (auto [cf, mult] : cofaces_[f])
                if (present[cf]) {
                    total += mult;
                    only = cf;
                }
            if (total == 1) out.push_back({f, only});
        }
        return out;
    }

private:
    std::vector<CellRef> cells_;
    std::vector<std::size_t> offset_;
    std::vector<std::vector<std::pair<std::size_t, int>>> cofaces_;
};

struct BitsHash {
    std::size_t operator()(const std::vector<bool>& v) const { return std::hash<std::vector<bool>>{}(v); }
};

} // namespace detail

/// Every (face, coface) pair where the face lies in exactly one coface, with
/// incidence multiplicity one.
inline std::vector<FreePair> free_faces(const TriangulatedSet& t) {
    detail::IncidenceTable table(t);
    std::vector<bool> all(table.size(), true);
    std::vector<FreePair> out;
    for (auto [f, c] : table.free_pairs(all)) out.push_back({table.cell(f), table.cell(c)});
    return out;
}

/// Depth-first search over all collapse sequences, memoizing complexes known
/// to be dead ends. non_collapsible is reported only after the reachable
/// space is exhausted within `budget` visited complexes. Moves are tried in
/// lexicographic order, so the certificate is the lexicographically least
/// successful sequence.
inline CollapseCertificate is_collapsible(const TriangulatedSet& t, long budget = 1000000) {
    if (budget <= 0) throw InvalidInput("collapse budget must be positive");
    detail::IncidenceTable table(t);
    CollapseCertificate cert;
    std::vector<bool> present(table.size(), true);
    std::unordered_set<std::vector<bool>, detail::BitsHash> dead;
    std::size_t alive = table.size();
    bool exhausted_budget = false;

    auto search = [&](auto&& self) -> bool {
        if (alive == 1) return table.cell(static_cast<std::size_t>(
                                   std::find(present.begin(), present.end(), true) - present.begin()))
                                   .dim == 0;
        if (dead.count(present)) return false;
        if (static_cast<long>(cert.nodes) >= budget) {
            exhausted_budget = true;
            return false;
        }
        ++cert.nodes;
        for (auto [f, c] : table.free_pairs(present)) {
            present[f] = present[c] = false;
            alive -= 2;
            cert.moves.push_back({table.cell(f), table.cell(c)});
            if (self(self)) return true;
            cert.moves.pop_back();
            present[f] = present[c] = true;
            alive += 2;
            if (exhausted_budget) return false;
        }
        dead.insert(present);
        return false;
    };

    if (alive > 0 && search(search)) {
        cert.kind = CollapseCertificate::Kind::collapsible;
    } else {
        cert.moves.clear();
        cert.kind = exhausted_budget ? CollapseCertificate::Kind::inconclusive
                                     : CollapseCertificate::Kind::non_collapsible;
    }
    return cert;
}

/// Replays a collapse sequence; returns the surviving cells per dimension, or
/// nullopt if some move is not an elementary collapse of a free face.
inline std::optional<std::vector<std::vector<bool>>> replay_collapse(const TriangulatedSet& t,
                                                                     const std::vector<FreePair>& moves) {
    detail::IncidenceTable table(t);
    std::vector<bool> present(table.size(), true);
    for (const auto& mv : moves) {
        if (mv.face.dim < 0 || mv.face.dim > t.dimension() || mv.coface.dim != mv.face.dim + 1 ||
            mv.face.id < 0 || mv.face.id >= static_cast<int>(t.count(mv.face.dim)) || mv.coface.id < 0 ||
            mv.coface.id >= static_cast<int>(t.count(mv.coface.dim)))
            return std::nullopt;
        const auto f = table.flat(mv.face), c = table.flat(mv.coface);
        bool legal = false;
        for (auto [ff, cc] : table.free_pairs(present))
            if (ff == f && cc == c) legal = true;
        if (!legal) return std::nullopt;
        present[f] = present[c] = false;
    }
    std::vector<std::vector<bool>> out(t.facets.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto cell = table.cell(i);
        if (out[cell.dim].empty()) out[cell.dim].assign(t.count(cell.dim), false);
        out[cell.dim][cell.id] = present[i];
    }
    return out;
}

/// True when the moves replay legally and leave a single vertex.
inline bool certificate_reaches_point(const TriangulatedSet& t, const std::vector<FreePair>& moves) {
    auto left = replay_collapse(t, moves);
    if (!left) return false;
    std::size_t count = 0;
    bool vertex = false;
    for (std::size_t n = 0; n < left->size(); ++n)
        for (bool p : (*left)[n])
            if (p) {
                ++count;
                vertex = n == 0;
            }
    return count == 1 && vertex;
}

} // namespace dunce
