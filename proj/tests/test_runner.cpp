#include <catch2/catch_amalgamated.hpp>

#include <iqr/config.hpp>
#include <iqr/mesh.hpp>
#include <iqr/runner.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using namespace iqr;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Directory that deletes itself (and everything under it) at scope end.
struct TempDir {
    std::string path;
    explicit TempDir(std::string p) : path(std::move(p)) {}
    ~TempDir() { std::filesystem::remove_all(path); }
};

RunConfig parse_text(const std::string& text) { return parse_config(json::parse(text)); }

} // namespace

TEST_CASE("config carries every documented field") {
    const RunConfig cfg = parse_text(R"({
        "problem": "heat1d",
        "eps": 0.5,
        "out": "artifacts",
        "stopping": {"rule": "morozov", "r": 1.0, "max_iter": 123},
        "noise": {"alpha": 0.02, "seed": 9, "corrupt_gd": false, "corrupt_gn": true},
        "heat": {"nt": 7, "nx": 5, "t_final": 2.0, "a": 0.5, "b": 1.5, "solution": "u2"}
    })");
    CHECK(cfg.problem == ProblemKind::Heat1d);
    CHECK(cfg.eps == 0.5);
    CHECK(cfg.out == "artifacts");
    CHECK(cfg.stopping.rule == "morozov");
    CHECK(cfg.stopping.r == 1.0);
    CHECK(cfg.stopping.max_iter == 123);
    CHECK(cfg.noise.alpha == 0.02);
    CHECK(cfg.noise.seed == 9);
    CHECK_FALSE(cfg.noise.corrupt_gd);
    CHECK(cfg.corrupt_gn());
    CHECK(cfg.heat.nt == 7);
    CHECK(cfg.heat.nx == 5);
    CHECK(cfg.heat.t_final == 2.0);
    CHECK(cfg.heat.a == 0.5);
    CHECK(cfg.heat.b == 1.5);
    CHECK(cfg.heat.solution == "u2");
}

TEST_CASE("config defaults match the documented experiment setup") {
    const RunConfig heat = parse_text(R"({"problem": "heat1d"})");
    CHECK(heat.eps == 1.0);
    CHECK(heat.stopping.rule == "morozov");
    CHECK(heat.stopping.r == 1.01);
    CHECK(heat.heat.nt == 50);
    CHECK(heat.heat.nx == 50);
    CHECK(heat.heat.a == 1.0);
    CHECK(heat.heat.b == 2.0);
    CHECK(heat.heat.solution == "u1");
    CHECK(heat.noise.corrupt_gd);
    CHECK(heat.corrupt_gn()); // the 1-D problem corrupts both channels

    const RunConfig ell = parse_text(R"({"problem": "elliptic2d"})");
    CHECK(ell.elliptic.synthesis.nr == 32);
    CHECK(ell.elliptic.synthesis.na == 128);
    CHECK(ell.elliptic.inversion.nr == 24);
    CHECK(ell.elliptic.inversion.na == 96);
    CHECK(ell.elliptic.gn_value == 1.0);
    CHECK(ell.elliptic.guard == 0.05);
    CHECK_FALSE(ell.corrupt_gn()); // the 2-D problem corrupts Dirichlet only
}

TEST_CASE("config rejects unknown keys at every level") {
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "typo": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "stopping": {"rr": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "noise": {"sigma": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "heat": {"ny": 2}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_text(R"({"problem": "elliptic2d", "elliptic": {"synthesis_mesh": {"m": 1}}})"),
        ConfigError);
}

TEST_CASE("config rejects sections the problem does not read") {
    CHECK_THROWS_AS(parse_text(R"({"problem": "elliptic2d", "heat": {"nt": 3}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "demo": {"n": 2}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "make_mesh", "eps": 2.0})"), ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "abstract_demo", "noise": {"alpha": 0}})"),
                    ConfigError);
}

TEST_CASE("config validates values") {
    CHECK_THROWS_AS(parse_text(R"({"problem": "nonsense"})"), ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "eps": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "eps": "one"})"), ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "noise": {"alpha": -0.1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "noise": {"seed": -3}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "heat": {"solution": "u3"}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "heat": {"a": 2, "b": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_text(R"({"problem": "heat1d", "stopping": {"rule": "bisect"}})"),
        ConfigError);
    // the floor rule wants exactly one tolerance
    CHECK_THROWS_AS(parse_text(R"({"problem": "heat1d", "stopping": {"rule": "floor"}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_text(
                        R"({"problem": "heat1d",
                            "stopping": {"rule": "floor", "tol": 1e-6, "tol_rel": 1e-8}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_text(R"({"problem": "heat1d", "stopping": {"rule": "morozov", "tol": 1e-6}})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_text(R"({"problem": "elliptic2d", "elliptic": {"guard": 0}})"), ConfigError);
    CHECK_THROWS_AS(
        parse_text(R"({"problem": "elliptic2d",
                       "elliptic": {"inversion_mesh": {"nr": 1, "na": 8}}})"),
        ConfigError);
}

TEST_CASE("config flags the inverse crime and Neumann corruption in 2-D") {
    CHECK_THROWS_AS(
        parse_text(R"({"problem": "elliptic2d",
                       "elliptic": {"synthesis_mesh": {"nr": 8, "na": 32},
                                    "inversion_mesh": {"nr": 8, "na": 32}}})"),
        InverseCrime);
    CHECK_THROWS_AS(
        parse_text(R"({"problem": "elliptic2d", "noise": {"corrupt_gn": true}})"),
        ConfigError);
}

TEST_CASE("command-line overrides replace the swept scalars") {
    RunConfig cfg = parse_text(R"({"problem": "heat1d", "eps": 2.0})");
    apply_overrides(cfg, {0.25, 0.05, std::uint64_t{42}, std::string("elsewhere")});
    CHECK(cfg.eps == 0.25);
    CHECK(cfg.noise.alpha == 0.05);
    CHECK(cfg.noise.seed == 42);
    CHECK(cfg.demo.seed == 42);
    CHECK(cfg.out == "elsewhere");

    CHECK_THROWS_AS(apply_overrides(cfg, {-1.0, {}, {}, {}}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, {{}, -0.5, {}, {}}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, {{}, {}, {}, std::string()}), ConfigError);
}

TEST_CASE("config loads from a file and reports parse failures") {
    const std::string path = "runner_cfg.json";
    {
        std::ofstream out(path);
        out << R"({"problem": "make_mesh", "mesh": {"nr": 3, "na": 12}})";
    }
    const RunConfig cfg = load_config(path);
    CHECK(cfg.problem == ProblemKind::MakeMesh);
    CHECK(cfg.mesh.nr == 3);
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
    CHECK_THROWS_AS(load_config("no_such_file.json"), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("ring transfer is exact on shared nodes and linear between them") {
    const std::vector<double> sig{1.0, 2.0, 4.0, 0.0};
    CHECK(transfer_ring(sig, 4) == sig);
    const std::vector<double> up = transfer_ring(sig, 8);
    CHECK(up[0] == 1.0);
    CHECK(up[2] == 2.0);
    CHECK(up[1] == Catch::Approx(1.5));
    CHECK(up[5] == Catch::Approx(2.0)); // between 4 and 0
    CHECK(up[7] == Catch::Approx(0.5)); // wraps around the seam
    CHECK_THROWS_AS(transfer_ring({}, 4), DimensionMismatch);
    CHECK_THROWS_AS(transfer_ring(sig, 0), DimensionMismatch);
}

TEST_CASE("make_mesh writes a readable mesh with the advertised counts") {
    TempDir dir("runner_mm_out");
    RunConfig cfg = parse_text(
        R"({"problem": "make_mesh", "out": "runner_mm_out", "mesh": {"nr": 3, "na": 16}})");
    std::ostringstream log;
    CHECK(run_make_mesh(cfg, log) == 0);
    const TriMesh m = read_mesh("runner_mm_out/annulus.txt");
    CHECK(m.nodes.size() == 3 * 16);
    CHECK(m.triangles.size() == 2 * 2 * 16);
    CHECK(m.boundary_edges.size() == 2 * 16);
    CHECK(log.str().find("48 nodes") != std::string::npos);
}

TEST_CASE("abstract demo reports all properties and honors edge configs") {
    std::ostringstream log;
    RunConfig cfg = parse_text(
        R"({"problem": "abstract_demo", "demo": {"n": 6, "count": 3, "seed": 11}})");
    CHECK(run_abstract_demo(cfg, log) == 0);
    CHECK(log.str().find("all properties hold") != std::string::npos);
    CHECK(log.str().find("series-equivalence") != std::string::npos);

    // count = 0: header only, success
    std::ostringstream empty_log;
    cfg.demo.count = 0;
    CHECK(run_abstract_demo(cfg, empty_log) == 0);
    CHECK(empty_log.str().find("property demo") != std::string::npos);
    CHECK(empty_log.str().find("series") == std::string::npos);

    // n = 1 prints the closed-form scalar table
    std::ostringstream scalar_log;
    cfg.demo.count = 2;
    cfg.demo.n = 1;
    CHECK(run_abstract_demo(cfg, scalar_log) == 0);
    CHECK(scalar_log.str().find("0.875") != std::string::npos);
    CHECK(scalar_log.str().find("0.125") != std::string::npos);
}

TEST_CASE("heat run emits its artifact set deterministically") {
    TempDir d1("runner_heat_a"), d2("runner_heat_b");
    RunConfig cfg = parse_text(R"({
        "problem": "heat1d", "out": "runner_heat_a",
        "stopping": {"rule": "fixed", "final_m": 40},
        "noise": {"alpha": 0.05, "seed": 4},
        "heat": {"nt": 10, "nx": 10}
    })");
    std::ostringstream log;
    CHECK(run_heat1d(cfg, log) == 0);
    cfg.out = "runner_heat_b";
    CHECK(run_heat1d(cfg, log) == 0);
    for (const char* f : {"trace.csv", "field.csv", "meta.json"})
        CHECK(slurp(std::string("runner_heat_a/") + f) ==
              slurp(std::string("runner_heat_b/") + f));

    const json meta = json::parse(slurp("runner_heat_a/meta.json"));
    CHECK(meta.at("result").at("stop_reason") == "fixed");
    CHECK(meta.at("result").at("m") == 40);
    CHECK(meta.at("delta").get<double>() > 0.0);
    CHECK(meta.at("result").at("rel_linf").get<double>() < 1.0);
    CHECK(meta.at("method_notes").size() >= 2);

    // trace.csv rows: header + 41 iterates
    const std::string trace = slurp("runner_heat_a/trace.csv");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 42);
    CHECK(trace.rfind("iteration,residual,b_seminorm,ab_norm\n", 0) == 0);
}

TEST_CASE("heat run maps an exhausted iteration cap to exit code 2") {
    TempDir dir("runner_heat_cap");
    RunConfig cfg = parse_text(R"({
        "problem": "heat1d", "out": "runner_heat_cap",
        "stopping": {"rule": "morozov", "r": 1.0, "max_iter": 2},
        "noise": {"alpha": 0.05, "seed": 4},
        "heat": {"nt": 10, "nx": 10}
    })");
    std::ostringstream log;
    CHECK(run_heat1d(cfg, log) == 2);
    const json meta = json::parse(slurp("runner_heat_cap/meta.json"));
    CHECK(meta.at("result").at("stop_reason") == "max_iterations");
}

TEST_CASE("heat run honors the relative residual floor") {
    TempDir dir("runner_heat_floor");
    // a loose relative floor triggers within a few iterations on exact data
    RunConfig cfg = parse_text(R"({
        "problem": "heat1d", "out": "runner_heat_floor",
        "stopping": {"rule": "floor", "tol_rel": 0.2, "max_iter": 500},
        "heat": {"nt": 8, "nx": 8}
    })");
    std::ostringstream log;
    CHECK(run_heat1d(cfg, log) == 0);
    const json meta = json::parse(slurp("runner_heat_floor/meta.json"));
    CHECK(meta.at("result").at("stop_reason") == "floor_reached");
}

TEST_CASE("elliptic run completes the pipeline and emits every artifact") {
    TempDir dir("runner_ell");
    RunConfig cfg = parse_text(R"({
        "problem": "elliptic2d", "out": "runner_ell",
        "stopping": {"rule": "fixed", "final_m": 80},
        "elliptic": {"synthesis_mesh": {"nr": 10, "na": 40},
                     "inversion_mesh": {"nr": 8, "na": 32}}
    })");
    std::ostringstream log;
    CHECK(run_elliptic2d(cfg, log) == 0);
    for (const char* f : {"trace.csv", "robin.csv", "gamma.csv", "gamma_c.csv",
                          "field.csv", "field.vtk", "meta.json"})
        CHECK(std::filesystem::exists(std::string("runner_ell/") + f));

    const json meta = json::parse(slurp("runner_ell/meta.json"));
    CHECK(meta.at("result").at("stop_reason") == "fixed");
    CHECK(meta.at("result").at("robin_mean_rel_err").get<double>() > 0.0);
    CHECK(meta.at("delta").get<double>() == 0.0);

    const std::string robin = slurp("runner_ell/robin.csv");
    CHECK(robin.rfind("theta,eta,eta_exact\n", 0) == 0);
    // every non-guarded inner edge contributes one row
    const auto rows = std::count(robin.begin(), robin.end(), '\n') - 1;
    const auto guarded = meta.at("result").at("robin_edges_guarded").get<long>();
    CHECK(rows + guarded == 32);

    const std::string gamma = slurp("runner_ell/gamma.csv");
    CHECK(std::count(gamma.begin(), gamma.end(), '\n') == 33);
}

TEST_CASE("elliptic run repeats byte-identically under a fixed seed") {
    TempDir d1("runner_ell_a"), d2("runner_ell_b");
    RunConfig cfg = parse_text(R"({
        "problem": "elliptic2d", "out": "runner_ell_a",
        "stopping": {"rule": "morozov", "r": 1.0, "max_iter": 60},
        "noise": {"alpha": 0.05, "seed": 21},
        "elliptic": {"synthesis_mesh": {"nr": 10, "na": 40},
                     "inversion_mesh": {"nr": 8, "na": 32}}
    })");
    std::ostringstream log;
    const int rc1 = run_elliptic2d(cfg, log);
    cfg.out = "runner_ell_b";
    const int rc2 = run_elliptic2d(cfg, log);
    CHECK(rc1 == rc2);
    for (const char* f :
         {"trace.csv", "robin.csv", "gamma.csv", "gamma_c.csv", "field.csv", "meta.json"})
        CHECK(slurp(std::string("runner_ell_a/") + f) ==
              slurp(std::string("runner_ell_b/") + f));
    const json meta = json::parse(slurp("runner_ell_a/meta.json"));
    CHECK(meta.at("delta").get<double>() > 0.0);
}
