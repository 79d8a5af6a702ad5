#pragma once

// Command-line dispatch. Every subcommand produces a schema-versioned JSON
// report; the human-readable output is rendered from that report.

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "dunce/reproduce.hpp"

namespace dunce::cli {

using io::json;

enum ExitCode { ok = 0, verdict_failure = 1, usage_error = 2, numeric_rejection = 3 };

struct Globals {
    bool json = false;
    bool timing = false;
    std::uint64_t seed = 1;
    bool seed_given = false;
    long budget = 1000000;
    Tolerances tol;
    GuardOptions guard;
    double consistency = 1e-6;
};

/// What a handler returns; dispatch wraps it into the full report.
struct Outcome {
    json input = nullptr;
    json results = json::object();
    json verdicts = json::object();
    bool uses_seed = false;
};

namespace detail {

struct Source {
    std::string file;
    std::string builtin;

    void add_to(CLI::App* app, const std::string& what) {
        app->add_option("file", file, what + " JSON file");
        app->add_option("--builtin", builtin, "named builtin " + what);
    }
    void require_one() const {
        if (file.empty() == builtin.empty()) throw InvalidInput("give exactly one of a file or --builtin NAME");
    }
};

inline json input_from_file(const std::string& path, const std::string& text) {
    return {{"source", "file:" + path}, {"digest", io::fnv1a(text)}};
}

inline json input_from_builtin(const std::string& name, const json& canonical) {
    return {{"source", "builtin:" + name}, {"digest", io::fnv1a(canonical.dump())}};
}

inline json input_from_seed(std::uint64_t seed) {
    return {{"source", "seed:" + std::to_string(seed)}, {"digest", io::fnv1a(std::to_string(seed))}};
}

inline std::pair<io::ComplexInput, json> load_complex(const Source& s) {
    s.require_one();
    if (!s.builtin.empty()) {
        auto c = io::complex_builtin(s.builtin);
        return {c, input_from_builtin(s.builtin, c.ssset ? io::to_json(*c.ssset) : io::to_json(*c.tset))};
    }
    const std::string text = io::read_file(s.file);
    auto c = io::complex_from_json(io::parse(text, s.file));
    c.name = s.file;
    return {c, input_from_file(s.file, text)};
}

inline std::pair<NCSurfaceDescription, json> load_surface(const Source& s) {
    s.require_one();
    if (!s.builtin.empty()) {
        auto d = io::ncsurf_builtin(s.builtin);
        return {d, input_from_builtin(s.builtin, io::to_json(d))};
    }
    const std::string text = io::read_file(s.file);
    return {io::ncsurf_from_json(io::parse(text, s.file)), input_from_file(s.file, text)};
}

/// A construct from a file, or from the global seed when no file is given.
inline std::pair<Construct, json> load_construct(const std::string& file, const Globals& g, Outcome& out,
                                                 bool seed_fallback) {
    if (!file.empty()) {
        const std::string text = io::read_file(file);
        const auto f = io::construct_file_from_json(io::parse(text, file));
        return {make_construct(f.p, f.q, f.choices, g.guard, g.tol), input_from_file(file, text)};
    }
    if (!seed_fallback) throw InvalidInput("a construct file is required");
    out.uses_seed = true;
    return {random_construct(g.seed, g.guard).construct, input_from_seed(g.seed)};
}

inline json homology_json(const std::vector<HomologyGroup>& h) {
    json a = json::array();
    for (const auto& x : h) a.push_back(io::to_json(x));
    return a;
}

inline json pairs_json(const std::vector<cplx>& v) {
    json a = json::array();
    for (auto z : v) a.push_back(io::to_json(z));
    return a;
}

inline json jpoint_json(const JPoint& p) { return {{"a", io::to_json(p.a)}, {"b", io::to_json(p.b)}}; }

inline bool residual_is_branches(const Construct& c, const DirectPipelineReport& r) {
    bool exact = r.residual.degree() == 3 && r.residual.terms().size() == 3;
    for (cplx p : {c.p1(), c.p2(), c.p3()}) exact = exact && r.residual.multiplicity_at(P1::finite(p)) == 1;
    return exact;
}

// --- human rendering -------------------------------------------------------

inline bool is_scalar(const json& j) { return !j.is_object() && !j.is_array(); }

inline std::string scalar(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_float()) {
        std::ostringstream s;
        s << std::setprecision(10) << j.get<double>();
        return s.str();
    }
    return j.dump();
}

inline bool flat_array(const json& j) {
    if (!j.is_array()) return false;
    for (const auto& x : j)
        if (!is_scalar(x) && !(x.is_array() && x.size() <= 4 && std::all_of(x.begin(), x.end(), is_scalar)))
            return false;
    return true;
}

inline std::string inline_array(const json& j) {
    std::string s = "[";
    bool first = true;
    for (const auto& x : j) {
        s += first ? "" : ", ";
        first = false;
        s += is_scalar(x) ? scalar(x) : inline_array(x);
    }
    return s + "]";
}

inline void render(const json& j, std::ostream& out, int indent) {
    const std::string pad(indent, ' ');
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (is_scalar(v))
                out << pad << k << ": " << scalar(v) << "\n";
            else if (flat_array(v) && inline_array(v).size() <= 100)
                out << pad << k << ": " << inline_array(v) << "\n";
            else {
                out << pad << k << ":\n";
                render(v, out, indent + 2);
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (is_scalar(v) || (flat_array(v) && inline_array(v).size() <= 100))
                out << pad << "- " << (is_scalar(v) ? scalar(v) : inline_array(v)) << "\n";
            else {
                out << pad << "-\n";
                render(v, out, indent + 2);
            }
        }
    } else {
        out << pad << scalar(j) << "\n";
    }
}

} // namespace detail

/// Human-readable form of a report. The reproduce bundle gets a table.
inline void render_human(const json& report, std::ostream& out) {
    out << "dunce " << report["subcommand"].get<std::string>() << ": " << (report["pass"].get<bool>() ? "PASS" : "FAIL")
        << "\n";
    if (report["subcommand"] == "reproduce") {
        for (const auto& c : report["results"]["criteria"]) {
            out << (c["pass"].get<bool>() ? "PASS" : "FAIL") << " [" << std::setw(2) << c["id"].get<int>() << "] "
                << std::left << std::setw(30) << c["name"].get<std::string>() << std::right << " "
                << c["summary"].get<std::string>();
            if (c.contains("seconds")) out << " (" << std::fixed << std::setprecision(2) << c["seconds"].get<double>() << " s)" << std::defaultfloat;
            out << "\n";
        }
        return;
    }
    if (!report["input"].is_null()) out << "input: " << report["input"]["source"].get<std::string>() << "\n";
    detail::render(report["results"], out, 0);
    if (!report["verdicts"].empty()) {
        out << "verdicts:\n";
        detail::render(report["verdicts"], out, 2);
    }
    if (report.contains("wall_time_s")) out << "wall time: " << report["wall_time_s"].get<double>() << " s\n";
}

/// Runs the command line. Returns the process exit code.
inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual complexes, nodal cubics and the gluing obstruction", "dunce"};
    app.set_version_flag("--version", io::tool_version);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_flag("--json", g.json, "emit the JSON report");
    app.add_flag("--timing", g.timing, "include wall time in the report");
    auto* seed_opt = app.add_option("--seed", g.seed, "random seed");
    app.add_option("--budget", g.budget, "search budget for collapse and Tietze searches");
    app.add_option("--tol-root", g.tol.root_residual, "relative root residual");
    app.add_option("--tol-cluster", g.tol.cluster_radius, "root clustering radius");
    app.add_option("--tol-rank", g.tol.rank_tol, "relative singular value threshold for rank");
    app.add_option("--tol-fd", g.tol.fd_step, "finite-difference step");
    app.add_option("--tol-consistency", g.consistency, "allowed relative deviation in consistency checks");
    app.add_option("--tol-collinear", g.guard.collinear_sine, "collinearity guard (sine)");

    std::string subcommand;
    std::function<Outcome()> handler;
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
        auto* sub = parent->add_subcommand(name, help);
        sub->fallthrough();
        return sub;
    };
    auto bind = [&](CLI::App* sub, std::string path, std::function<Outcome()> f) {
        sub->callback([&, path, f] {
            subcommand = path;
            handler = f;
        });
    };

    // --- topo ---------------------------------------------------------------
    auto* topo = app.add_subcommand("topo", "semi-simplicial and triangulated complexes");
    topo->require_subcommand(1);
    topo->fallthrough();
    detail::Source topo_src;

    auto* homology_cmd = leaf(topo, "homology", "integral homology");
    topo_src.add_to(homology_cmd, "complex");
    bind(homology_cmd, "topo homology", [&] {
        Outcome o;
        auto [c, input] = detail::load_complex(topo_src);
        o.input = input;
        const auto t = c.as_tset();
        const auto cc = chain_complex(t);
        bool square_zero = true;
        try {
            cc.check_square_zero();
        } catch (const InvalidInput&) {
            square_zero = false;
        }
        const auto h = homology(cc);
        o.results = {{"counts", t.counts()}, {"homology", detail::homology_json(h)},
                     {"reduced", detail::homology_json(reduced(h))}, {"acyclic", is_acyclic(reduced(h))}};
        o.verdicts = {{"boundary_squares_to_zero", square_zero}};
        return o;
    });

    auto* euler_cmd = leaf(topo, "euler", "Euler characteristic");
    topo_src.add_to(euler_cmd, "complex");
    bind(euler_cmd, "topo euler", [&] {
        Outcome o;
        auto [c, input] = detail::load_complex(topo_src);
        o.input = input;
        const auto t = c.as_tset();
        const long chi = euler_characteristic(t), from_betti = euler_from_betti(homology(t));
        o.results = {{"counts", t.counts()}, {"euler", chi}, {"from_betti", from_betti}};
        o.verdicts = {{"euler_poincare", chi == from_betti}};
        return o;
    });

    auto* collapse_cmd = leaf(topo, "collapse", "collapsibility search");
    topo_src.add_to(collapse_cmd, "complex");
    bind(collapse_cmd, "topo collapse", [&] {
        Outcome o;
        auto [c, input] = detail::load_complex(topo_src);
        o.input = input;
        const auto t = c.as_tset();
        const auto free = free_faces(t);
        const auto cert = is_collapsible(t, g.budget);
        json moves = json::array(), frees = json::array();
        for (const auto& m : cert.moves) moves.push_back(io::to_json(m));
        for (const auto& m : free) frees.push_back(io::to_json(m));
        o.results = {{"free_faces", frees}, {"result", to_string(cert.kind)}, {"nodes", cert.nodes},
                     {"budget", g.budget}, {"moves", moves}};
        o.verdicts = {{"decided", cert.kind != CollapseCertificate::Kind::inconclusive}};
        if (cert.kind == CollapseCertificate::Kind::collapsible)
            o.verdicts["certificate_replays"] = certificate_reaches_point(t, cert.moves);
        return o;
    });

    auto* pi1_cmd = leaf(topo, "pi1", "edge-path presentation and Tietze search");
    topo_src.add_to(pi1_cmd, "complex");
    bind(pi1_cmd, "topo pi1", [&] {
        Outcome o;
        auto [c, input] = detail::load_complex(topo_src);
        o.input = input;
        const auto t = c.as_tset();
        const auto ep = edge_path_presentation(t);
        TietzeOptions opt;
        opt.budget = g.budget;
        const auto tz = tietze_trivialize(ep.presentation, opt);
        const auto ab = abelianization(ep.presentation);
        json moves = json::array();
        for (const auto& m : tz.moves)
            moves.push_back({{"kind", m.kind == TietzeMove::Kind::eliminate ? "eliminate" : "multiply"},
                             {"relator", m.relator}, {"generator", m.generator}, {"other", m.other}, {"sign", m.sign}});
        const auto h = homology(t);
        const auto h1 = h.size() > 1 ? h[1] : HomologyGroup{};
        o.results = {{"presentation", io::to_json(ep.presentation)}, {"trivial", tz.verdict == TietzeResult::Verdict::trivial},
                     {"search", to_string(tz.verdict)}, {"note", tz.note}, {"nodes", tz.nodes}, {"budget", g.budget},
                     {"moves", moves}, {"abelianization", io::to_json(ab)}};
        o.verdicts = {{"abelianization_is_H1", ab.betti == h1.betti && ab.torsion == h1.torsion}};
        return o;
    });

    auto* subdivide_cmd = leaf(topo, "subdivide", "barycentric subdivision");
    topo_src.add_to(subdivide_cmd, "complex");
    bind(subdivide_cmd, "topo subdivide", [&] {
        Outcome o;
        auto [c, input] = detail::load_complex(topo_src);
        o.input = input;
        const auto t = c.as_tset();
        const auto sub = barycentric_subdivision(t);
        o.results = {{"counts_before", t.counts()}, {"counts_after", sub.counts()},
                     {"euler_before", euler_characteristic(t)}, {"euler_after", euler_characteristic(sub)},
                     {"complex", io::to_json(sub)}};
        o.verdicts = {{"euler_invariant", euler_characteristic(t) == euler_characteristic(sub)}};
        return o;
    });

    // --- nc -------------------------------------------------------------------
    auto* nc = app.add_subcommand("nc", "normal crossing surface descriptions");
    nc->require_subcommand(1);
    nc->fallthrough();
    detail::Source nc_src;

    auto* dual_cmd = leaf(nc, "dual-complex", "dual complex of the strata");
    nc_src.add_to(dual_cmd, "surface");
    bind(dual_cmd, "nc dual-complex", [&] {
        Outcome o;
        auto [d, input] = detail::load_surface(nc_src);
        o.input = input;
        const auto t = dual_complex(d);
        json matches = json::array();
        for (const auto& name : io::complex_builtins())
            if (are_isomorphic(t, io::complex_builtin(name).as_tset())) matches.push_back(name);
        o.results = {{"counts", t.counts()}, {"isomorphic_builtins", matches}, {"complex", io::to_json(t)}};
        return o;
    });

    auto* kulikov_cmd = leaf(nc, "kulikov", "degree of T^1 on each double curve");
    nc_src.add_to(kulikov_cmd, "surface");
    bind(kulikov_cmd, "nc kulikov", [&] {
        Outcome o;
        auto [d, input] = detail::load_surface(nc_src);
        o.input = input;
        json curves = json::array();
        bool all = true;
        for (const auto& k : kulikov_degrees(d)) {
            curves.push_back({{"curve", k.curve}, {"degree", k.degree}});
            all = all && k.satisfied();
        }
        o.results = {{"curves", curves}};
        o.verdicts = {{"degrees_vanish", all}};
        return o;
    });

    auto* chi_cmd = leaf(nc, "chi", "Euler characteristic and invariants of the generic fiber");
    nc_src.add_to(chi_cmd, "surface");
    long h10 = 0, h20 = 0;
    chi_cmd->add_option("--h10", h10, "h^{1,0} of the generic fiber");
    chi_cmd->add_option("--h20", h20, "h^{2,0} of the generic fiber");
    bind(chi_cmd, "nc chi", [&] {
        Outcome o;
        auto [d, input] = detail::load_surface(nc_src);
        o.input = input;
        const long chi = generic_fiber_euler(d);
        const auto n = numerical_invariants(chi, h10, h20);
        o.results = {{"euler", chi}, {"h10", h10}, {"h20", h20}, {"h11", n.h11}, {"c1_sq", n.c1_sq}, {"c2", n.c2}};
        o.verdicts = {{"noether", n.c1_sq + n.c2 == 12}};
        return o;
    });

    auto* pic_cmd = leaf(nc, "pic0", "Pic^0 torus of the double locus curve");
    nc_src.add_to(pic_cmd, "surface");
    bind(pic_cmd, "nc pic0", [&] {
        Outcome o;
        auto [d, input] = detail::load_surface(nc_src);
        o.input = input;
        const auto graph = double_locus_graph(d);
        const auto p = pic0_structure(graph);
        o.results = {{"components", p.components}, {"points", p.points}, {"ambient_rank", p.ambient_rank},
                     {"connected_components", p.connected_components}, {"dimension", p.dimension}};
        return o;
    });

    auto* ncpi1_cmd = leaf(nc, "pi1", "vanishing of pi_1 of the generic fiber");
    nc_src.add_to(ncpi1_cmd, "surface");
    bool components_sc = false;
    ncpi1_cmd->add_flag("--components-simply-connected", components_sc,
                        "assert that every component minus the double locus is simply connected");
    bind(ncpi1_cmd, "nc pi1", [&] {
        Outcome o;
        auto [d, input] = detail::load_surface(nc_src);
        o.input = input;
        TietzeOptions opt;
        opt.budget = g.budget;
        const auto v = pi1_vanishing_verdict(d, std::vector<bool>(d.count(0), components_sc), opt);
        o.results = {{"reasons", v.reasons}, {"dual_pi1", to_string(v.tietze.verdict)},
                     {"abelianization", io::to_json(v.abelianization)}, {"components_asserted", components_sc}};
        o.verdicts = {{"pi1_vanishes", v.vanishes}};
        return o;
    });

    // --- cubic ----------------------------------------------------------------
    auto* cubic = app.add_subcommand("cubic", "constructs of two nodal cubics");
    cubic->require_subcommand(1);
    cubic->fallthrough();
    std::string construct_file, output_file;

    auto emit_construct = [&](const Construct& c, std::optional<std::uint64_t> seed, int attempts, Outcome& o) {
        const json cj = io::construct_to_json(c, seed, attempts);
        if (!output_file.empty()) {
            std::ofstream f(output_file);
            if (!f) throw InvalidInput("cannot write '" + output_file + "'");
            f << cj.dump(2) << "\n";
            o.results["written"] = output_file;
        }
        o.results["construct"] = cj;
        o.results["derived"] = io::construct_summary(c);
    };

    auto* make_cmd = leaf(cubic, "make", "build a construct from parametrizations and choices");
    make_cmd->add_option("file", construct_file, "construct JSON file")->required();
    make_cmd->add_option("-o,--output", output_file, "write the construct file here");
    bind(make_cmd, "cubic make", [&] {
        Outcome o;
        auto [c, input] = detail::load_construct(construct_file, g, o, false);
        o.input = input;
        emit_construct(c, std::nullopt, 0, o);
        o.verdicts = {{"guards", true}};
        return o;
    });

    auto* random_cmd = leaf(cubic, "random", "rejection-sample a construct from the seed");
    random_cmd->add_option("-o,--output", output_file, "write the construct file here");
    bind(random_cmd, "cubic random", [&] {
        Outcome o;
        o.uses_seed = true;
        o.input = detail::input_from_seed(g.seed);
        const auto rc = random_construct(g.seed, g.guard);
        emit_construct(rc.construct, g.seed, rc.attempts, o);
        o.verdicts = {{"guards", true}};
        return o;
    });

    auto* validate_cmd = leaf(cubic, "validate", "re-run every guard on a construct file");
    validate_cmd->add_option("file", construct_file, "construct JSON file")->required();
    bind(validate_cmd, "cubic validate", [&] {
        Outcome o;
        auto [c, input] = detail::load_construct(construct_file, g, o, false);
        o.input = input;
        o.results = {{"n_P", io::to_json(c.n_p)}, {"n_Q", io::to_json(c.n_q)},
                     {"intersections", c.intersections.size()}, {"collinearity_sine", c.collinearity_sine}};
        o.verdicts = {{"guards", true}, {"bezout", c.intersections.size() == 9}};
        return o;
    });

    auto* show_cmd = leaf(cubic, "show", "derived data of a construct");
    show_cmd->add_option("file", construct_file, "construct JSON file");
    bind(show_cmd, "cubic show", [&] {
        Outcome o;
        auto [c, input] = detail::load_construct(construct_file, g, o, true);
        o.input = input;
        o.results = io::construct_summary(c);
        return o;
    });

    // --- obs ------------------------------------------------------------------
    auto* obs = app.add_subcommand("obs", "the gluing obstruction");
    obs->require_subcommand(1);
    obs->fallthrough();

    auto* data_cmd = leaf(obs, "data", "closed-form and direct gluing data of a construct");
    data_cmd->add_option("file", construct_file, "construct JSON file (default: random from --seed)");
    bind(data_cmd, "obs data", [&] {
        Outcome o;
        auto [c, input] = detail::load_construct(construct_file, g, o, true);
        o.input = input;
        const auto triple = closed_form_triple(c);
        const JPoint closed = normalize(triple);
        const MainRows rows = eval_main_rows(c);
        o.results = {{"n_P", io::to_json(c.n_p)},
                     {"n_Q", io::to_json(c.n_q)},
                     {"closed_form", {{"G", detail::pairs_json({triple.g.begin(), triple.g.end()})},
                                      {"J", detail::jpoint_json(closed)}}},
                     {"main_rows", {{"lambda", detail::pairs_json({rows.lambda.begin(), rows.lambda.end()})},
                                    {"ds_dv", detail::pairs_json({rows.ds_dv.begin(), rows.ds_dv.end()})},
                                    {"rows", detail::pairs_json({rows.rows.begin(), rows.rows.end()})}}}};
        try {
            const auto d = direct_pipeline(c, false, g.tol);
            o.results["direct"] = {{"J", detail::jpoint_json(d.point)},
                                   {"residual", io::to_json(d.residual)},
                                   {"h", io::to_json(d.h)},
                                   {"ratio", detail::jpoint_json({d.point.a / closed.a, d.point.b / closed.b})}};
            o.verdicts = {{"residual_is_branches", detail::residual_is_branches(c, d)}};
        } catch (const PipelineFailure& e) {
            o.results["direct"] = {{"failure", e.what()}};
            o.verdicts = {{"residual_is_branches", false}};
        }
        return o;
    });

    int family_size = 5;
    double spread = 0.1;
    bool mutate = false;
    auto* cons_cmd = leaf(obs, "consistency", "direct pipeline against the closed form on a family");
    cons_cmd->add_option("--family-size", family_size, "members of the affine family")->check(CLI::PositiveNumber);
    cons_cmd->add_option("--spread", spread, "size of the family shears");
    cons_cmd->add_flag("--mutate", mutate, "drop the f_Q factor in the second closed-form coordinate");
    bind(cons_cmd, "obs consistency", [&] {
        Outcome o;
        o.uses_seed = true;
        o.input = detail::input_from_seed(g.seed);
        const auto family = seeded_family(g.seed, family_size, spread);
        const auto rep = consistency_check(family, mutate ? ClosedFormMutation::drop_fq_in_a2 : ClosedFormMutation::none);
        json ratios = json::array();
        for (const auto& r : rep.ratios) ratios.push_back(detail::jpoint_json(r));
        o.results = {{"n_P", io::to_json(family[0].n_p)}, {"n_Q", io::to_json(family[0].n_q)},
                     {"family_size", family_size}, {"mutated", mutate}, {"deviation", rep.deviation},
                     {"ratios", ratios}};
        o.verdicts = {{"consistent", rep.deviation <= g.consistency}};
        return o;
    });

    auto* jac_cmd = leaf(obs, "jacobian", "rank of the obstruction map along the two shear families");
    jac_cmd->add_option("file", construct_file, "construct JSON file (default: random from --seed)");
    bind(jac_cmd, "obs jacobian", [&] {
        Outcome o;
        auto [c, input] = detail::load_construct(construct_file, g, o, true);
        o.input = input;
        JacobianRankOptions opt;
        opt.rank_tol = g.tol.rank_tol;
        opt.h = g.tol.fd_step;
        opt.guard = g.guard;
        const auto r = jacobian_rank(c, opt);
        json sv = json::array();
        for (Eigen::Index i = 0; i < r.jacobian.singular_values.size(); ++i) sv.push_back(r.jacobian.singular_values[i]);
        o.results = {{"n_P", io::to_json(c.n_p)}, {"n_Q", io::to_json(c.n_q)}, {"rank", r.rank},
                     {"singular_values", sv}, {"richardson_gap", r.jacobian.richardson_gap}, {"unstable", r.unstable}};
        o.verdicts = {{"full_rank", r.rank == 4}, {"stable", !r.unstable}};
        return o;
    });

    int targets = 20;
    double scan_tol = 1e-8;
    auto* scan_cmd = leaf(obs, "scan", "Newton continuation to random targets");
    scan_cmd->add_option("--targets", targets, "number of random targets")->check(CLI::NonNegativeNumber);
    scan_cmd->add_option("--tol", scan_tol, "Newton residual tolerance");
    bind(scan_cmd, "obs scan", [&] {
        Outcome o;
        o.uses_seed = true;
        o.input = detail::input_from_seed(g.seed);
        ScanOptions opt;
        opt.tol = scan_tol;
        const auto rep = surjectivity_scan(g.seed, random_targets(g.seed, targets), opt);
        json rs = json::array();
        for (const auto& r : rep.results) {
            json e{{"target", detail::jpoint_json(r.target)}, {"reached", r.reached}, {"iterations", r.iterations},
                   {"residual", r.residual}};
            if (!r.failure.empty()) e["failure"] = r.failure;
            rs.push_back(e);
        }
        o.results = {{"n_P", io::to_json(rep.n_p)}, {"n_Q", io::to_json(rep.n_q)}, {"tolerance", scan_tol},
                     {"reached", rep.successes()}, {"targets", rs}};
        o.verdicts = {{"all_reached", rep.successes() == targets}};
        return o;
    });

    // --- reproduce ------------------------------------------------------------
    auto* repro = app.add_subcommand("reproduce", "run every acceptance criterion");
    repro->fallthrough();
    bool quick = false;
    repro->add_flag("--quick", quick, "10 constructs instead of 100 in the rank sweep");
    bind(repro, "reproduce", [&] {
        Outcome o;
        o.uses_seed = true;
        ReproduceOptions opt;
        opt.seed = g.seed;
        opt.quick = quick;
        opt.rank_tol = g.tol.rank_tol;
        opt.consistency_tol = g.consistency;
        opt.budget = g.budget;
        json criteria = json::array();
        for (const auto& r : reproduce_all(opt)) {
            criteria.push_back(to_json(r, g.timing));
            o.verdicts[std::to_string(r.id) + " " + r.name] = r.pass;
        }
        o.results = {{"quick", quick}, {"criteria", criteria}};
        return o;
    });

    // --- run ------------------------------------------------------------------
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }
    g.seed_given = seed_opt->count() > 0;

    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = handler();
    } catch (const NumericRejection& e) {
        err << "dunce: numeric rejection: " << e.what() << "\n";
        return numeric_rejection;
    } catch (const InvalidInput& e) {
        err << "dunce: invalid input: " << e.what() << "\n";
        return usage_error;
    } catch (const Unsupported& e) {
        err << "dunce: unsupported: " << e.what() << "\n";
        return usage_error;
    } catch (const PipelineFailure& e) {
        err << "dunce: pipeline failure: " << e.what() << "\n";
        return verdict_failure;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool pass = true;
    for (const auto& [k, v] : o.verdicts.items()) pass = pass && v.get<bool>();
    json report{{"schema", io::report_schema},
                {"tool", {{"name", "dunce"}, {"version", io::tool_version}}},
                {"subcommand", subcommand},
                {"input", o.input},
                {"seed", o.uses_seed ? json(g.seed) : json(nullptr)},
                {"tolerances",
                 {{"root_residual", g.tol.root_residual},
                  {"cluster_radius", g.tol.cluster_radius},
                  {"rank_tol", g.tol.rank_tol},
                  {"fd_step", g.tol.fd_step},
                  {"consistency", g.consistency},
                  {"collinear_sine", g.guard.collinear_sine},
                  {"budget", g.budget}}},
                {"results", o.results},
                {"verdicts", o.verdicts},
                {"pass", pass}};
    if (g.timing) report["wall_time_s"] = wall;
    if (g.json)
        out << report.dump(2) << "\n";
    else
        render_human(report, out);
    return pass ? ok : verdict_failure;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(std::move(args), out, err);
}

} // namespace dunce::cli
