#pragma once

#include <random>

#include "dunce/simplicial.hpp"

namespace dunce::fixtures {

/// Random small semi-simplicial set of dimension <= 2. Triangles are built
/// on random vertex triples (repeats allowed), reusing or adding parallel
/// edges, so the identities hold by construction.
inline SemiSimplicialSet random_ssset(std::mt19937& rng, int max_vertices = 4, int max_triangles = 4) {
    std::uniform_int_distribution<int> nv_d(1, max_vertices), nt_d(0, max_triangles), coin(0, 3);
    SemiSimplicialSet s;
    const int nv = nv_d(rng);
    s.faces.resize(3);
    s.faces[0].assign(nv, {});
    std::uniform_int_distribution<int> pick(0, nv - 1);
    auto edge = [&](int from, int to) {
        std::vector<int> match;
        for (int e = 0; e < static_cast<int>(s.faces[1].size()); ++e)
            if (s.faces[1][e] == std::vector<int>{to, from}) match.push_back(e);
        if (match.empty() || coin(rng) == 0) {
            s.faces[1].push_back({to, from});
            return static_cast<int>(s.faces[1].size()) - 1;
        }
        return match[std::uniform_int_distribution<int>(0, static_cast<int>(match.size()) - 1)(rng)];
    };
    const int nt = nt_d(rng);
    for (int i = 0; i < nt; ++i) {
        int a = pick(rng), b = pick(rng), c = pick(rng);
        int e01 = edge(a, b), e12 = edge(b, c), e02 = edge(a, c);
        s.faces[2].push_back({e12, e02, e01});
    }
    for (int i = coin(rng); i > 0; --i) edge(pick(rng), pick(rng));
    if (s.faces[2].empty()) s.faces.pop_back();
    if (s.faces[1].empty()) s.faces.pop_back();
    return s;
}

} // namespace dunce::fixtures
