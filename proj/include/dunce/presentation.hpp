#pragma once

// Edge-path presentations of the fundamental group of a 2-dimensional
// triangulated set, abelianization, and a bounded Tietze search that tries to
// prove a presentation trivial.

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dunce/homology.hpp"

namespace dunce {

/// Letters are signed 1-based generator indices: +(i+1) is g_i, -(i+1) its inverse.
using Word = std::vector<int>;

struct GroupPresentation {
    int generators = 0;
    std::vector<Word> relators;
    bool operator==(const GroupPresentation&) const = default;
};

inline std::string to_string(const Word& w) {
    if (w.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        out += 'g' + std::to_string(std::abs(w[i]) - 1);
        if (w[i] < 0) out += "^-1";
    }
    return out;
}

inline Word free_reduce(const Word& w) {
    Word out;
    for (int l : w) {
        if (!out.empty() && out.back() == -l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

inline Word cyclic_reduce(Word w) {
    w = free_reduce(w);
    std::size_t a = 0, b = w.size();
    while (b - a >= 2 && w[a] == -w[b - 1]) {
        ++a;
        --b;
    }
    return Word(w.begin() + static_cast<long>(a), w.begin() + static_cast<long>(b));
}

inline Word inverse(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (int& l : out) l = -l;
    return out;
}

inline void validate(const GroupPresentation& p) {
    if (p.generators < 0) throw InvalidInput("presentation: negative generator count");
    for (const auto& r : p.relators)
        for (int l : r)
            if (l == 0 || std::abs(l) > p.generators)
                throw InvalidInput("presentation: relator references missing generator " + std::to_string(l));
}

// ---------------------------------------------------------------------------
// Edge-path group

struct EdgePathData {
    GroupPresentation presentation;
    /// generator_edge[i] = reduced edge id of generator i
    std::vector<int> generator_edge;
    std::vector<int> tree_edges;
};

/// Spanning tree by BFS from the basepoint, scanning edges in id order.
/// Generators are the edges off the tree; every triangle contributes the
/// word read along slots 0 -> 1 -> 2 -> 0.
inline EdgePathData edge_path_presentation(const TriangulatedSet& t, int basepoint = 0) {
    require_valid(t, "edge_path_presentation");
    const int nv = static_cast<int>(t.count(0));
    const int ne = static_cast<int>(t.count(1));
    if (nv == 0) throw InvalidInput("edge_path_presentation: empty complex");
    if (basepoint < 0 || basepoint >= nv) throw InvalidInput("edge_path_presentation: basepoint out of range");
    // edge e runs from its slot-0 vertex to its slot-1 vertex; deleting slot k leaves the other one
    auto tail = [&](int e) { return t.at(1, e).attach[1].target; };
    auto head = [&](int e) { return t.at(1, e).attach[0].target; };

    std::vector<bool> reached(nv, false), in_tree(ne, false);
    std::deque<int> queue{basepoint};
    reached[basepoint] = true;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int e = 0; e < ne; ++e) {
            int other = -1;
            if (tail(e) == v) other = head(e);
            else if (head(e) == v) other = tail(e);
            if (other < 0 || reached[other]) continue;
            reached[other] = true;
            in_tree[e] = true;
            queue.push_back(other);
        }
    }
    for (int v = 0; v < nv; ++v)
        if (!reached[v]) throw InvalidInput("edge_path_presentation: complex is disconnected");

    EdgePathData out;
    std::vector<int> gen_of(ne, -1);
    for (int e = 0; e < ne; ++e) {
        if (in_tree[e]) {
            out.tree_edges.push_back(e);
        } else {
            gen_of[e] = static_cast<int>(out.generator_edge.size());
            out.generator_edge.push_back(e);
        }
    }
    out.presentation.generators = static_cast<int>(out.generator_edge.size());
    for (int x = 0; x < static_cast<int>(t.count(2)); ++x) {
        Word w;
        const int path[4] = {0, 1, 2, 0};
        for (int i = 0; i < 3; ++i) {
            const int from = path[i], to = path[i + 1];
            auto face = face_of(t, 2, x, {std::min(from, to), std::max(from, to)});
            const int e = face.cell.id;
            if (gen_of[e] < 0) continue;
            const bool forward = face.slot_map.at(from) == 0;
            w.push_back(forward ? gen_of[e] + 1 : -(gen_of[e] + 1));
        }
        out.presentation.relators.push_back(cyclic_reduce(w));
    }
    return out;
}

inline EdgePathData edge_path_presentation(const SemiSimplicialSet& s, int basepoint = 0) {
    return edge_path_presentation(functor_p(s), basepoint);
}

/// Abelianization Z^g / (relator exponent sums), as (betti, torsion).
inline HomologyGroup abelianization(const GroupPresentation& p) {
    validate(p);
    IntMatrix m(p.relators.size(), static_cast<std::size_t>(p.generators));
    for (std::size_t r = 0; r < p.relators.size(); ++r)
        for (int l : p.relators[r]) m(r, static_cast<std::size_t>(std::abs(l) - 1)) += l > 0 ? 1 : -1;
    auto snf = smith_normal_form(m);
    HomologyGroup h;
    h.betti = p.generators - static_cast<long>(snf.rank());
    for (const auto& f : snf.invariant_factors)
        if (f > 1) h.torsion.push_back(f);
    return h;
}

// ---------------------------------------------------------------------------
// Tietze search

struct TietzeMove {
    enum class Kind {
        /// Solve relator `relator` for generator `generator` (which occurs
        /// exactly once in it), substitute everywhere, drop both.
        eliminate,
        /// Replace relator `relator` by relator * other^sign.
        multiply,
    };
    Kind kind = Kind::eliminate;
    int relator = 0;
    int generator = 0;
    int other = 0;
    int sign = 1;
    bool operator==(const TietzeMove&) const = default;
};

struct TietzeResult {
    enum class Verdict { trivial, inconclusive };
    Verdict verdict = Verdict::inconclusive;
    std::vector<TietzeMove> moves;
    std::size_t nodes = 0;
    /// Why an inconclusive verdict was reached.
    std::string note;
};

/// Freely and cyclically reduce every relator and drop the empty ones.
inline GroupPresentation normalize(GroupPresentation p) {
    std::vector<Word> kept;
    for (auto& r : p.relators) {
        auto c = cyclic_reduce(r);
        if (!c.empty()) kept.push_back(std::move(c));
    }
    p.relators = std::move(kept);
    return p;
}

/// Applies one move to a normalized presentation. Throws InvalidInput if the
/// move is not legal there.
inline GroupPresentation apply_move(const GroupPresentation& p, const TietzeMove& mv) {
    const int nr = static_cast<int>(p.relators.size());
    if (mv.relator < 0 || mv.relator >= nr) throw InvalidInput("tietze move: relator index out of range");
    GroupPresentation out = p;
    if (mv.kind == TietzeMove::Kind::multiply) {
        if (mv.other < 0 || mv.other >= nr || mv.other == mv.relator || (mv.sign != 1 && mv.sign != -1))
            throw InvalidInput("tietze move: bad multiply operands");
        Word w = p.relators[mv.relator];
        const Word& o = p.relators[mv.other];
        if (mv.sign > 0)
            w.insert(w.end(), o.begin(), o.end());
        else {
            auto inv = inverse(o);
            w.insert(w.end(), inv.begin(), inv.end());
        }
        out.relators[mv.relator] = w;
        return normalize(out);
    }
    const int x = mv.generator + 1;
    if (mv.generator < 0 || mv.generator >= p.generators) throw InvalidInput("tietze move: generator out of range");
    const Word& r = p.relators[mv.relator];
    int pos = -1, count = 0;
    for (int i = 0; i < static_cast<int>(r.size()); ++i)
        if (std::abs(r[i]) == x) {
            pos = i;
            ++count;
        }
    if (count != 1) throw InvalidInput("tietze move: generator does not occur exactly once in the relator");
    // r ~ x^e * rest  =>  x = rest^{-1} when e = +1, x = rest when e = -1
    Word rest;
    for (int i = 1; i < static_cast<int>(r.size()); ++i) rest.push_back(r[(pos + i) % r.size()]);
    const Word image = r[pos] > 0 ? inverse(rest) : rest;
    const Word image_inv = inverse(image);
    out.relators.clear();
    for (int i = 0; i < nr; ++i) {
        if (i == mv.relator) continue;
        Word w;
        for (int l : p.relators[i]) {
            if (l == x) w.insert(w.end(), image.begin(), image.end());
            else if (l == -x) w.insert(w.end(), image_inv.begin(), image_inv.end());
            else w.push_back(l);
        }
        for (int& l : w)
            if (std::abs(l) > x) l += l > 0 ? -1 : 1;
        out.relators.push_back(std::move(w));
    }
    out.generators = p.generators - 1;
    return normalize(out);
}

/// Replays a certificate from the normalized input; the result is trivial
/// exactly when no generators remain.
inline GroupPresentation replay_tietze(const GroupPresentation& p, const std::vector<TietzeMove>& moves) {
    validate(p);
    auto cur = normalize(p);
    for (const auto& mv : moves) cur = apply_move(cur, mv);
    return cur;
}

namespace detail {

/// Canonical key: each relator's least rotation among itself and its
/// inverse, relators sorted.
inline std::pair<int, std::vector<Word>> canonical_key(const GroupPresentation& p) {
    std::vector<Word> rels;
    for (const auto& r : p.relators) {
        Word best = r;
        for (const Word& w : {r, inverse(r)}) {
            for (std::size_t s = 0; s < w.size(); ++s) {
                Word rot(w.begin() + static_cast<long>(s), w.end());
                rot.insert(rot.end(), w.begin(), w.begin() + static_cast<long>(s));
                if (rot < best) best = rot;
            }
        }
        rels.push_back(best);
    }
    std::sort(rels.begin(), rels.end());
    return {p.generators, rels};
}

inline std::size_t total_length(const GroupPresentation& p) {
    std::size_t n = 0;
    for (const auto& r : p.relators) n += r.size();
    return n;
}

} // namespace detail

struct TietzeOptions {
    long budget = 1000000;
    /// Allow relator products when no elimination is available.
    bool products = true;
    /// Words longer than this are not explored.
    std::size_t max_word_length = 64;
};

/// Best-first search: presentations with fewer generators, then shorter total
/// length, are expanded first; eliminations are tried before products, and
/// shorter relators first. Nonzero abelianization short-circuits to
/// inconclusive (the group is then certainly nontrivial).
inline TietzeResult tietze_trivialize(const GroupPresentation& input, const TietzeOptions& opt = {}) {
    if (opt.budget <= 0) throw InvalidInput("tietze budget must be positive");
    validate(input);
    TietzeResult res;
    auto ab = abelianization(input);
    if (!ab.is_zero()) {
        res.note = "abelianization is nonzero";
        return res;
    }
    struct Node {
        GroupPresentation p;
        std::vector<TietzeMove> path;
    };
    std::vector<Node> nodes;
    using Entry = std::tuple<int, std::size_t, std::size_t>; // generators, length, insertion order
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    std::set<std::pair<int, std::vector<Word>>> seen;
    auto push = [&](GroupPresentation p, std::vector<TietzeMove> path) {
        if (!seen.insert(detail::canonical_key(p)).second) return;
        frontier.push({p.generators, detail::total_length(p), nodes.size()});
        nodes.push_back({std::move(p), std::move(path)});
    };
    push(normalize(input), {});
    while (!frontier.empty()) {
        if (static_cast<long>(res.nodes) >= opt.budget) {
            res.note = "budget exhausted";
            return res;
        }
        auto [g, len, id] = frontier.top();
        frontier.pop();
        ++res.nodes;
        const GroupPresentation cur = nodes[id].p;
        const std::vector<TietzeMove> path = nodes[id].path;
        if (cur.generators == 0) {
            res.verdict = TietzeResult::Verdict::trivial;
            res.moves = path;
            return res;
        }
        std::vector<int> order(cur.relators.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return cur.relators[a].size() < cur.relators[b].size(); });
        bool eliminated = false;
        for (int r : order) {
            std::map<int, int> occ;
            for (int l : cur.relators[r]) ++occ[std::abs(l)];
            for (auto [x, c] : occ) {
                if (c != 1) continue;
                TietzeMove mv{TietzeMove::Kind::eliminate, r, x - 1, 0, 1};
                auto next = apply_move(cur, mv);
                auto np = path;
                np.push_back(mv);
                push(std::move(next), std::move(np));
                eliminated = true;
            }
        }
        if (eliminated || !opt.products) continue;
        for (int r : order)
            for (int o : order) {
                if (o == r) continue;
                for (int sign : {1, -1}) {
                    TietzeMove mv{TietzeMove::Kind::multiply, r, 0, o, sign};
                    auto next = apply_move(cur, mv);
                    bool too_long = false;
                    for (const auto& w : next.relators) too_long = too_long || w.size() > opt.max_word_length;
                    if (too_long) continue;
                    auto np = path;
                    np.push_back(mv);
                    push(std::move(next), std::move(np));
                }
            }
    }
    res.note = "search space exhausted without reaching the trivial presentation";
    return res;
}

inline const char* to_string(TietzeResult::Verdict v) {
    return v == TietzeResult::Verdict::trivial ? "trivial" : "inconclusive";
}

} // namespace dunce
