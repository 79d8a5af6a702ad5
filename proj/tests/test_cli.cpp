#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "dunce/cli.hpp"

using namespace dunce;
using io::json;

namespace {

struct Invocation {
    int code = -1;
    std::string out, err;
    json report() const { return json::parse(out); }
};

Invocation run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Invocation r;
    r.code = cli::dispatch(std::move(args), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string data(const std::string& name) { return std::string(DUNCE_DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
    const auto p = std::filesystem::temp_directory_path() / ("dunce_test_" + name);
    std::ofstream(p) << contents;
    return p.string();
}

} // namespace

TEST(Cli, HomologyOfBuiltin) {
    const Invocation r = run({"topo", "homology", "--builtin", "duncehat", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.report();
    EXPECT_EQ(j["schema"], "dunce.report/1");
    EXPECT_EQ(j["subcommand"], "topo homology");
    const json& h = j["results"]["homology"];
    ASSERT_EQ(h.size(), 3u);
    EXPECT_EQ(h[0]["betti"], 1);
    EXPECT_EQ(h[1]["betti"], 0);
    EXPECT_TRUE(h[1]["torsion"].empty());
    EXPECT_EQ(h[2]["betti"], 0);
}

TEST(Cli, KulikovOfBuiltinSurface) {
    const Invocation r = run({"nc", "kulikov", "--builtin", "duncehat-surface", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.report()["results"]["curves"][0]["degree"], 0);
}

TEST(Cli, ConsistencyBySeed) {
    const Invocation r = run({"obs", "consistency", "--seed", "7", "--family-size", "5", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.report();
    EXPECT_EQ(j["seed"], 7);
    EXPECT_LE(j["results"]["deviation"].get<double>(), 1e-6);
    EXPECT_EQ(j["results"]["ratios"].size(), 5u);
}

TEST(Cli, MutatedConsistencyFailsTheVerdict) {
    EXPECT_EQ(run({"obs", "consistency", "--seed", "7", "--mutate"}).code, 1);
}

TEST(Cli, FilesAgreeWithBuiltins) {
    const json a = run({"topo", "homology", data("duncehat.json"), "--json"}).report();
    const json b = run({"topo", "homology", "--builtin", "duncehat", "--json"}).report();
    EXPECT_EQ(a["results"], b["results"]);
    const json c = run({"topo", "homology", data("cyclic_triangle.json"), "--json"}).report();
    EXPECT_EQ(c["results"]["homology"][1]["torsion"], json::array({"3"}));
    const json d = run({"nc", "chi", data("duncehat_surface.json"), "--json"}).report();
    EXPECT_EQ(d["results"]["euler"], 11);
    EXPECT_EQ(d["results"]["h11"], 9);
}

TEST(Cli, InputDigestIsOfTheFileBytes) {
    const json j = run({"topo", "euler", data("duncehat.json"), "--json"}).report();
    EXPECT_EQ(j["input"]["digest"], io::fnv1a(io::read_file(data("duncehat.json"))));
}

TEST(Cli, Fnv1aReferenceValues) {
    EXPECT_EQ(io::fnv1a(""), "cbf29ce484222325");
    EXPECT_EQ(io::fnv1a("a"), "af63dc4c8601ec8c");
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"topo", "homology"}).code, 2);
    EXPECT_EQ(run({"topo", "homology", "--builtin", "nope"}).code, 2);
    EXPECT_EQ(run({"topo", "homology", "--builtin", "duncehat", data("duncehat.json")}).code, 2);
    EXPECT_EQ(run({"topo", "homology", "/nonexistent/file.json"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, MalformedJson) {
    const Invocation r = run({"topo", "homology", temp_file("bad.json", "{\"kind\": \"ssset\", ")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("malformed JSON"), std::string::npos);
}

TEST(Cli, BrokenComplexIsRejected) {
    // the edge's two faces must agree with the triangle's face identities
    const std::string bad = R"({"kind":"ssset","dims":[2,1,1],"faces":{"1":[[0,1]],"2":[[0,0,0]]}})";
    EXPECT_EQ(run({"topo", "homology", temp_file("broken.json", bad)}).code, 2);
}

TEST(Cli, SchemaMismatch) {
    json c = json::parse(io::read_file(data("construct_seed3.json")));
    c["schema"] = "dunce.construct/99";
    const Invocation r = run({"cubic", "validate", temp_file("schema.json", c.dump())});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("schema"), std::string::npos);
}

TEST(Cli, GuardRejectionExitsWithThree) {
    EXPECT_EQ(run({"cubic", "validate", data("construct_seed3.json")}).code, 0);
    const Invocation r = run({"cubic", "validate", data("construct_seed3.json"), "--tol-collinear", "0.99"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("collinear"), std::string::npos);
}

TEST(Cli, DegenerateCubicIsRejected) {
    json c = json::parse(io::read_file(data("construct_seed3.json")));
    // a parametrized line: Z = 1, X = t, Y = 2t
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 4; ++k) c["P"]["coeffs"][i][k] = json::array({"0", "0"});
    c["P"]["coeffs"][0][1] = json::array({"1", "0"});
    c["P"]["coeffs"][1][1] = json::array({"2", "0"});
    c["P"]["coeffs"][2][0] = json::array({"1", "0"});
    EXPECT_EQ(run({"cubic", "validate", temp_file("line.json", c.dump())}).code, 3);
}

TEST(Cli, ReportsAreByteIdentical) {
    const std::vector<std::string> args{"obs", "jacobian", "--seed", "4", "--json"};
    const Invocation a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.report().contains("wall_time_s"));
    auto timed = args;
    timed.push_back("--timing");
    EXPECT_TRUE(run(timed).report().contains("wall_time_s"));
}

TEST(Cli, HumanOutputIsRenderedFromTheReport) {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"nc", "pic0", "--builtin", "duncehat-surface"},
          std::vector<std::string>{"obs", "data", "--seed", "2"}}) {
        const Invocation human = run(args);
        auto jargs = args;
        jargs.push_back("--json");
        std::ostringstream rendered;
        cli::render_human(run(jargs).report(), rendered);
        EXPECT_EQ(human.out, rendered.str());
    }
}

TEST(Cli, ConstructFileRoundTrip) {
    const std::string path = (std::filesystem::temp_directory_path() / "dunce_test_rt.json").string();
    ASSERT_EQ(run({"cubic", "random", "--seed", "5", "-o", path}).code, 0);
    const json from_file = run({"cubic", "show", path, "--json"}).report();
    const json from_seed = run({"cubic", "show", "--seed", "5", "--json"}).report();
    EXPECT_EQ(from_file["results"], from_seed["results"]);
    const json again = run({"cubic", "make", path, "--json"}).report();
    EXPECT_EQ(again["results"]["construct"]["P"], json::parse(io::read_file(path))["P"]);
}

TEST(Cli, ObstructionDataFromFile) {
    const Invocation r = run({"obs", "data", data("construct_seed3.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.report();
    EXPECT_EQ(j["results"]["direct"]["residual"].size(), 3u);
    EXPECT_EQ(j["results"]["closed_form"]["G"].size(), 3u);
}

TEST(Cli, ScanAndJacobian) {
    const json s = run({"obs", "scan", "--seed", "3", "--targets", "2", "--json"}).report();
    EXPECT_EQ(s["results"]["reached"], 2);
    EXPECT_LE(s["results"]["targets"][0]["residual"].get<double>(), 1e-8);
    const Invocation j = run({"obs", "jacobian", data("construct_seed3.json"), "--json"});
    EXPECT_EQ(j.code, 0);
    EXPECT_EQ(j.report()["results"]["rank"], 4);
}

TEST(Cli, SurfacePi1NeedsTheComponentHypothesis) {
    EXPECT_EQ(run({"nc", "pi1", "--builtin", "duncehat-surface"}).code, 1);
    EXPECT_EQ(run({"nc", "pi1", "--builtin", "duncehat-surface", "--components-simply-connected"}).code, 0);
    EXPECT_EQ(run({"nc", "pi1", "--builtin", "wrong-case", "--components-simply-connected"}).code, 1);
}

TEST(Cli, DualComplexIdentifiesBuiltins) {
    const json j = run({"nc", "dual-complex", "--builtin", "wrong-case", "--json"}).report();
    EXPECT_EQ(j["results"]["isomorphic_builtins"], json::array({"cyclic-triangle"}));
}

TEST(Cli, CollapseAndSubdivide) {
    const json c = run({"topo", "collapse", "--builtin", "duncehat", "--json"}).report();
    EXPECT_EQ(c["results"]["result"], "non_collapsible");
    const json t = run({"topo", "collapse", "--builtin", "triangle", "--json"}).report();
    EXPECT_EQ(t["results"]["result"], "collapsible");
    EXPECT_EQ(t["verdicts"]["certificate_replays"], true);
    const json s = run({"topo", "subdivide", "--builtin", "duncehat", "--json"}).report();
    EXPECT_EQ(s["results"]["euler_after"], 1);
    // the subdivided complex is itself a valid input
    const std::string path = temp_file("sub.json", s["results"]["complex"].dump());
    EXPECT_EQ(run({"topo", "euler", path, "--json"}).report()["results"]["euler"], 1);
}

TEST(Cli, ComplexJsonRoundTrip) {
    for (const auto& name : io::complex_builtins()) {
        const auto c = io::complex_builtin(name);
        const json j = c.ssset ? io::to_json(*c.ssset) : io::to_json(*c.tset);
        const auto back = io::complex_from_json(json::parse(j.dump()));
        EXPECT_EQ(back.as_tset(), c.as_tset()) << name;
    }
    const auto d = io::ncsurf_from_json(json::parse(io::to_json(duncehat_surface_description()).dump()));
    EXPECT_EQ(d, duncehat_surface_description());
}

TEST(Cli, ReproduceQuickAndTampered) {
    const Invocation good = run({"reproduce", "--quick", "--json"});
    EXPECT_EQ(good.code, 0);
    EXPECT_EQ(good.report()["results"]["criteria"].size(), 11u);
    const Invocation bad = run({"reproduce", "--quick", "--tol-rank", "0.5", "--json"});
    EXPECT_EQ(bad.code, 1);
    const json crit = bad.report()["results"]["criteria"];
    for (const auto& c : crit) EXPECT_EQ(c["pass"].get<bool>(), c["id"] != 9) << c["name"];
}
