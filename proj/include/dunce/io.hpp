#pragma once

// JSON formats (complex.json, ncsurf.json, construct.json), named builtins
// and report helpers.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dunce/collapse.hpp"
#include "dunce/cubics.hpp"
#include "dunce/homology.hpp"
#include "dunce/ncgeom.hpp"
#include "dunce/obstruction.hpp"
#include "dunce/presentation.hpp"

namespace dunce::io {

using json = nlohmann::ordered_json;

inline constexpr const char* report_schema = "dunce.report/1";
inline constexpr const char* construct_schema = "dunce.construct/1";
inline constexpr const char* tool_version = "0.1.0";

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput("malformed JSON in " + what + ": " + e.what());
    }
}

namespace detail {

template <class T>
T get(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key)) throw InvalidInput(ctx + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(ctx + ": field '" + key + "' has the wrong type");
    }
}

inline std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_number(const json& j, const std::string& ctx) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        try {
            std::size_t used = 0;
            const std::string s = j.get<std::string>();
            const double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    throw InvalidInput(ctx + ": expected a decimal number");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Complex numbers

/// [re, im] as numbers, for reports.
inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }
/// [re, im] as exact decimal strings, for inputs that must round-trip.
inline json to_json_exact(cplx z) { return json::array({detail::exact(z.real()), detail::exact(z.imag())}); }

inline cplx complex_from_json(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2) throw InvalidInput(ctx + ": expected [re, im]");
    return {detail::parse_number(j[0], ctx), detail::parse_number(j[1], ctx)};
}

// ---------------------------------------------------------------------------
// complex.json

/// Parsed complex: exactly one of the two kinds is set.
struct ComplexInput {
    std::optional<SemiSimplicialSet> ssset;
    std::optional<TriangulatedSet> tset;
    std::string name;

    TriangulatedSet as_tset() const { return ssset ? functor_p(*ssset) : *tset; }
};

inline json to_json(const SlotAttachment& a) { return {{"target", a.target}, {"injection", a.injection}}; }

inline json to_json(const SemiSimplicialSet& s) {
    json j{{"kind", "ssset"}, {"dims", s.counts()}, {"faces", json::object()}};
    for (int n = 1; n <= s.dimension(); ++n) j["faces"][std::to_string(n)] = s.faces[n];
    return j;
}

inline json to_json(const TriangulatedSet& t) {
    json j{{"kind", "tset"}, {"dims", t.counts()}, {"attach", json::object()}};
    for (int n = 1; n <= t.dimension(); ++n) {
        json level = json::array();
        for (const auto& f : t.facets[n]) {
            json slots = json::array();
            for (const auto& a : f.attach) slots.push_back(to_json(a));
            level.push_back(slots);
        }
        j["attach"][std::to_string(n)] = level;
    }
    bool any_stab = false;
    for (const auto& level : t.facets)
        for (const auto& f : level) any_stab = any_stab || !f.stabilizer.empty();
    if (any_stab) {
        json st = json::object();
        for (int n = 0; n <= t.dimension(); ++n)
            for (std::size_t id = 0; id < t.facets[n].size(); ++id)
                if (!t.facets[n][id].stabilizer.empty())
                    st[std::to_string(n) + ":" + std::to_string(id)] = t.facets[n][id].stabilizer;
        j["stabilizers"] = st;
    }
    return j;
}

inline SlotAttachment attachment_from_json(const json& j, const std::string& ctx) {
    SlotAttachment a;
    a.target = detail::get<int>(j, "target", ctx);
    a.injection = detail::get<std::vector<int>>(j, "injection", ctx);
    return a;
}

inline ComplexInput complex_from_json(const json& j) {
    const std::string ctx = "complex.json";
    const auto kind = detail::get<std::string>(j, "kind", ctx);
    const auto dims = detail::get<std::vector<std::size_t>>(j, "dims", ctx);
    if (dims.empty()) throw InvalidInput(ctx + ": dims must be non-empty");
    ComplexInput out;
    if (kind == "ssset") {
        SemiSimplicialSet s;
        s.faces.resize(dims.size());
        s.faces[0].assign(dims[0], {});
        const json faces = j.contains("faces") ? j["faces"] : json::object();
        for (std::size_t n = 1; n < dims.size(); ++n) {
            const std::string key = std::to_string(n);
            if (!faces.contains(key)) throw InvalidInput(ctx + ": missing faces for dimension " + key);
            try {
                s.faces[n] = faces[key].get<std::vector<std::vector<int>>>();
            } catch (const json::exception&) {
                throw InvalidInput(ctx + ": faces[" + key + "] must be arrays of integers");
            }
            if (s.faces[n].size() != dims[n]) throw InvalidInput(ctx + ": dims disagree with faces[" + key + "]");
        }
        require_valid(s, ctx.c_str());
        out.ssset = std::move(s);
    } else if (kind == "tset") {
        TriangulatedSet t;
        t.facets.resize(dims.size());
        t.facets[0].resize(dims[0]);
        const json attach = j.contains("attach") ? j["attach"] : json::object();
        for (std::size_t n = 1; n < dims.size(); ++n) {
            const std::string key = std::to_string(n);
            if (!attach.contains(key) || !attach[key].is_array())
                throw InvalidInput(ctx + ": missing attach for dimension " + key);
            for (const auto& facet : attach[key]) {
                ReducedFacet f;
                if (!facet.is_array()) throw InvalidInput(ctx + ": attach entries must be arrays");
                for (const auto& a : facet) f.attach.push_back(attachment_from_json(a, ctx));
                t.facets[n].push_back(std::move(f));
            }
            if (t.facets[n].size() != dims[n]) throw InvalidInput(ctx + ": dims disagree with attach[" + key + "]");
        }
        if (j.contains("stabilizers")) {
            for (const auto& [key, val] : j["stabilizers"].items()) {
                const auto colon = key.find(':');
                if (colon == std::string::npos) throw InvalidInput(ctx + ": stabilizer keys are 'dim:id'");
                const int n = std::stoi(key.substr(0, colon)), id = std::stoi(key.substr(colon + 1));
                if (n < 0 || n >= static_cast<int>(t.facets.size()) || id < 0 ||
                    id >= static_cast<int>(t.facets[n].size()))
                    throw InvalidInput(ctx + ": stabilizer key out of range");
                t.facets[n][id].stabilizer = val.get<std::vector<Ordering>>();
            }
        }
        require_valid(t, ctx.c_str());
        out.tset = std::move(t);
    } else {
        throw InvalidInput(ctx + ": kind must be 'ssset' or 'tset'");
    }
    return out;
}

inline const std::vector<std::string>& complex_builtins() {
    static const std::vector<std::string> names{"duncehat", "cyclic-triangle", "tetrahedron-boundary", "triangle",
                                                "two-triangles"};
    return names;
}

inline ComplexInput complex_builtin(const std::string& name) {
    ComplexInput c;
    c.name = name;
    if (name == "duncehat")
        c.ssset = make_duncehat();
    else if (name == "cyclic-triangle")
        c.tset = make_cyclic_triangle();
    else if (name == "tetrahedron-boundary")
        c.ssset = make_tetrahedron_boundary();
    else if (name == "triangle")
        c.ssset = make_simplex(2);
    else if (name == "two-triangles")
        c.ssset = make_two_triangles_sharing_two_edges();
    else
        throw InvalidInput("unknown complex builtin '" + name + "'");
    return c;
}

// ---------------------------------------------------------------------------
// ncsurf.json

inline json to_json(const NCStratum& s) {
    json j{{"name", s.name}, {"branches", s.branches}, {"continuation", json::array()},
           {"branch_trivial", s.branch_trivial}};
    for (const auto& a : s.continuation) j["continuation"].push_back(to_json(a));
    if (s.chi_normalization) j["chi"] = *s.chi_normalization;
    if (s.normal_degrees) j["normal_degrees"] = *s.normal_degrees;
    if (s.triple_points) j["triple_points"] = *s.triple_points;
    if (s.special_points) j["special_points"] = *s.special_points;
    return j;
}

inline json to_json(const NCSurfaceDescription& d) {
    json j{{"name", d.name}, {"strata", json::array()}};
    for (const auto& level : d.strata) {
        json l = json::array();
        for (const auto& s : level) l.push_back(to_json(s));
        j["strata"].push_back(l);
    }
    return j;
}

inline NCSurfaceDescription ncsurf_from_json(const json& j) {
    const std::string ctx = "ncsurf.json";
    NCSurfaceDescription d;
    d.name = j.is_object() && j.contains("name") ? j["name"].get<std::string>() : "";
    if (!j.is_object() || !j.contains("strata") || !j["strata"].is_array())
        throw InvalidInput(ctx + ": missing field 'strata'");
    for (const auto& level : j["strata"]) {
        std::vector<NCStratum> out;
        for (const auto& s : level) {
            NCStratum st;
            st.name = detail::get<std::string>(s, "name", ctx);
            st.branches = detail::get<std::vector<std::string>>(s, "branches", ctx);
            for (const auto& a : detail::get<json>(s, "continuation", ctx)) st.continuation.push_back(attachment_from_json(a, ctx));
            if (s.contains("branch_trivial")) st.branch_trivial = s["branch_trivial"].get<bool>();
            if (s.contains("chi")) st.chi_normalization = s["chi"].get<long>();
            if (s.contains("normal_degrees")) st.normal_degrees = s["normal_degrees"].get<std::array<long, 2>>();
            if (s.contains("triple_points")) st.triple_points = s["triple_points"].get<long>();
            if (s.contains("special_points")) st.special_points = s["special_points"].get<long>();
            out.push_back(std::move(st));
        }
        d.strata.push_back(std::move(out));
    }
    require_valid(d, ctx.c_str());
    return d;
}

inline NCSurfaceDescription ncsurf_builtin(const std::string& name) {
    if (name == "duncehat-surface") return duncehat_surface_description();
    if (name == "wrong-case") return wrong_case_surface_description();
    if (name == "three-planes") return three_planes_description();
    if (name == "two-planes") return two_planes_description();
    throw InvalidInput("unknown surface builtin '" + name + "'");
}

// ---------------------------------------------------------------------------
// construct.json

inline json coeffs_to_json(const Coeffs& c) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        json row = json::array();
        for (int k = 0; k < 4; ++k) row.push_back(to_json_exact(c(i, k)));
        rows.push_back(row);
    }
    return rows;
}

inline Coeffs coeffs_from_json(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput(ctx + ": coefficients must be 3 rows");
    Coeffs c;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_array() || j[i].size() != 4) throw InvalidInput(ctx + ": each row has 4 coefficients");
        for (int k = 0; k < 4; ++k) c(i, k) = complex_from_json(j[i][k], ctx);
    }
    return c;
}

struct ConstructFile {
    Coeffs p, q;
    ConstructChoices choices;
    std::optional<std::uint64_t> seed;
    int attempts = 0;
};

/// The input part of a construct: parametrizations, choices, provenance.
/// The stored coefficients are the normalized ones, so the node order is
/// given by the choices relative to them.
inline json construct_to_json(const Construct& c, std::optional<std::uint64_t> seed = std::nullopt, int attempts = 0) {
    json j{{"schema", construct_schema},
           {"P", {{"coeffs", coeffs_to_json(c.P.coeffs)}}},
           {"Q", {{"coeffs", coeffs_to_json(c.Q.coeffs)}}},
           {"choices",
            {{"swap_p", c.choices.swap_p},
             {"swap_q", c.choices.swap_q},
             {"intersection", c.n_index},
             {"b", to_json_exact(c.choices.b)}}}};
    json prov = json::object();
    if (seed) {
        prov["seed"] = *seed;
        prov["attempts"] = attempts;
    }
    j["provenance"] = prov;
    return j;
}

inline ConstructFile construct_file_from_json(const json& j) {
    const std::string ctx = "construct.json";
    if (!j.is_object()) throw InvalidInput(ctx + ": expected an object");
    if (j.contains("schema") && j["schema"] != construct_schema)
        throw InvalidInput(ctx + ": schema mismatch (expected " + std::string(construct_schema) + ")");
    ConstructFile f;
    f.p = coeffs_from_json(detail::get<json>(detail::get<json>(j, "P", ctx), "coeffs", ctx), ctx);
    f.q = coeffs_from_json(detail::get<json>(detail::get<json>(j, "Q", ctx), "coeffs", ctx), ctx);
    if (j.contains("choices")) {
        const json& ch = j["choices"];
        if (ch.contains("swap_p")) f.choices.swap_p = ch["swap_p"].get<bool>();
        if (ch.contains("swap_q")) f.choices.swap_q = ch["swap_q"].get<bool>();
        if (ch.contains("intersection")) f.choices.intersection = ch["intersection"].get<int>();
        if (ch.contains("b")) f.choices.b = complex_from_json(ch["b"], ctx);
    }
    if (j.contains("provenance") && j["provenance"].contains("seed")) {
        f.seed = j["provenance"]["seed"].get<std::uint64_t>();
        f.attempts = j["provenance"].value("attempts", 0);
    }
    return f;
}

inline Construct build(const ConstructFile& f, const GuardOptions& guard = {}) {
    return make_construct(f.p, f.q, f.choices, guard);
}

/// Derived data of a construct, for display.
inline json construct_summary(const Construct& c) {
    auto cubic = [](const NodalCubic& k) {
        json fl = json::array();
        for (auto f : k.flexes) fl.push_back(to_json(f));
        json fc = json::array();
        for (auto a : k.f.c) fc.push_back(to_json(a));
        return json{{"node_params", {to_json(k.u1), to_json(k.u2)}},
                    {"node", {to_json(k.node()[0] / k.node()[2]), to_json(k.node()[1] / k.node()[2])}},
                    {"flexes", fl},
                    {"implicit", fc}};
    };
    json xs = json::array();
    for (const auto& x : c.intersections) xs.push_back({{"t_P", to_json(x.t_p)}, {"s_Q", to_json(x.s_q)}});
    return {{"n_P", to_json(c.n_p)},
            {"n_Q", to_json(c.n_q)},
            {"P", cubic(c.P)},
            {"Q", cubic(c.Q)},
            {"n_index", c.n_index},
            {"p3", to_json(c.p3())},
            {"q3", to_json(c.q3())},
            {"psi_P", to_json(c.psi_P())},
            {"psi_Q", to_json(c.psi_Q())},
            {"tau_b", to_json(c.tau_b())},
            {"collinearity_sine", c.collinearity_sine},
            {"intersections", xs}};
}

inline json to_json(const JPoint& p) { return {to_json(p.a), to_json(p.b)}; }

inline json to_json(const Divisor& d) {
    json out = json::array();
    for (const auto& t : d.terms()) {
        if (t.point.is_infinite())
            out.push_back({{"point", "inf"}, {"multiplicity", t.multiplicity}});
        else
            out.push_back({{"point", to_json(t.point.value())}, {"multiplicity", t.multiplicity}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Topology payloads

inline json to_json(const HomologyGroup& h) {
    json tors = json::array();
    for (const auto& t : h.torsion) tors.push_back(t.str());
    return {{"betti", h.betti}, {"torsion", tors}};
}

inline json to_json(const FreePair& p) {
    return json::array({json::array({p.face.dim, p.face.id}), json::array({p.coface.dim, p.coface.id})});
}

inline json to_json(const GroupPresentation& p) {
    json rel = json::array();
    for (const auto& r : p.relators) rel.push_back(to_string(r));
    return {{"generators", p.generators}, {"relators", rel}};
}

} // namespace dunce::io
