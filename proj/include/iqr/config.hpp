#pragma once

// Run configuration for the batch tool.  A run is described by a small JSON
// document; parsing is strict (unknown keys are rejected, every numeric field
// is validated) so that a typo cannot silently fall back to a default.  The
// command line may override the handful of scalars that experiments sweep
// (eps, alpha, seed, output directory).
//
// Schema by problem kind -- top-level keys "problem", "out", "eps" are always
// accepted; each section below is accepted only for the problem that reads it:
//
//   heat1d       "stopping", "noise", "heat" {nt, nx, t_final, a, b, solution}
//   elliptic2d   "stopping", "noise", "elliptic" {synthesis_mesh, inversion_mesh,
//                gn_value, guard}, each mesh {nr, na}
//   abstract_demo"demo" {n, count, seed}
//   make_mesh    "mesh" {nr, na, file}
//
// "stopping" holds {rule: morozov|fixed|floor, r, max_iter, final_m, tol,
// tol_rel}; tol is an absolute residual floor, tol_rel is multiplied by
// sqrt(c) of the assembled load at run time (exactly one of the two for the
// floor rule).  "noise" holds {alpha, seed, corrupt_gd, corrupt_gn}; the
// corruption flags default per problem: the 1-D lateral problem corrupts both
// data channels, the 2-D problem corrupts the Dirichlet channel only.

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "errors.hpp"

namespace iqr {

enum class ProblemKind { AbstractDemo, Heat1d, Elliptic2d, MakeMesh };

[[nodiscard]] constexpr const char* to_string(ProblemKind p) {
    switch (p) {
        case ProblemKind::AbstractDemo: return "abstract_demo";
        case ProblemKind::Heat1d: return "heat1d";
        case ProblemKind::Elliptic2d: return "elliptic2d";
        case ProblemKind::MakeMesh: return "make_mesh";
    }
    return "unknown";
}

struct StoppingConfig {
    std::string rule = "morozov";      ///< morozov | fixed | floor
    double r = 1.01;                   ///< discrepancy factor (morozov)
    std::size_t max_iter = 10000;      ///< cap for morozov / floor
    std::size_t final_m = 0;           ///< iterate index to run to (fixed)
    std::optional<double> tol;         ///< absolute residual floor
    std::optional<double> tol_rel;     ///< residual floor as a multiple of sqrt(c)
};

struct NoiseConfig {
    double alpha = 0.0;
    std::uint64_t seed = 1;
    bool corrupt_gd = true;
    std::optional<bool> corrupt_gn;    ///< unset: per-problem default
};

struct HeatConfig {
    std::size_t nt = 50;
    std::size_t nx = 50;
    double t_final = 1.0;
    double a = 1.0;
    double b = 2.0;
    std::string solution = "u1";       ///< u1 | u2
};

struct MeshParams {
    std::size_t nr = 2;
    std::size_t na = 8;
};

struct EllipticConfig {
    MeshParams synthesis{32, 128};     ///< direct solve for data synthesis
    MeshParams inversion{24, 96};      ///< completion runs here
    double gn_value = 1.0;             ///< Neumann datum on the outer boundary
    double guard = 0.05;               ///< trace guard for the Robin read-off
};

struct MakeMeshConfig {
    std::size_t nr = 24;
    std::size_t na = 96;
    std::string file = "annulus.txt";
};

struct DemoConfig {
    std::size_t n = 12;
    std::size_t count = 50;
    std::uint64_t seed = 1;
};

struct RunConfig {
    ProblemKind problem = ProblemKind::AbstractDemo;
    double eps = 1.0;
    std::string out = "out";
    StoppingConfig stopping;
    NoiseConfig noise;
    HeatConfig heat;
    EllipticConfig elliptic;
    MakeMeshConfig mesh;
    DemoConfig demo;

    /// The effective Neumann-corruption flag (per-problem default when the
    /// config did not set it).
    bool corrupt_gn() const {
        if (noise.corrupt_gn) return *noise.corrupt_gn;
        return problem == ProblemKind::Heat1d;
    }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, std::string_view where,
                           std::initializer_list<std::string_view> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const std::string_view k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError(std::string(where) + ": unknown key \"" + item.key() + "\"");
    }
}

inline double get_double(const json& obj, const char* key, double fallback,
                         std::string_view where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(std::string(where) + "." + key + " must be a number");
    return v.get<double>();
}

inline std::size_t get_size(const json& obj, const char* key, std::size_t fallback,
                            std::string_view where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0))
        throw ConfigError(std::string(where) + "." + key +
                          " must be a nonnegative integer");
    return v.get<std::size_t>();
}

inline std::uint64_t get_seed(const json& obj, const char* key, std::uint64_t fallback,
                              std::string_view where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)))
        throw ConfigError(std::string(where) + "." + key +
                          " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline bool get_bool(const json& obj, const char* key, bool fallback,
                     std::string_view where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError(std::string(where) + "." + key + " must be a boolean");
    return v.get<bool>();
}

inline std::string get_string(const json& obj, const char* key, std::string fallback,
                              std::string_view where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError(std::string(where) + "." + key + " must be a string");
    return v.get<std::string>();
}

inline MeshParams parse_mesh_params(const json& obj, std::string_view where) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    reject_unknown(obj, where, {"nr", "na"});
    MeshParams m;
    m.nr = get_size(obj, "nr", m.nr, where);
    m.na = get_size(obj, "na", m.na, where);
    if (m.nr < 2) throw ConfigError(std::string(where) + ".nr must be >= 2");
    if (m.na < 8) throw ConfigError(std::string(where) + ".na must be >= 8");
    return m;
}

inline StoppingConfig parse_stopping(const json& obj) {
    if (!obj.is_object()) throw ConfigError("stopping must be an object");
    reject_unknown(obj, "stopping", {"rule", "r", "max_iter", "final_m", "tol", "tol_rel"});
    StoppingConfig s;
    s.rule = get_string(obj, "rule", s.rule, "stopping");
    if (s.rule != "morozov" && s.rule != "fixed" && s.rule != "floor")
        throw ConfigError("stopping.rule must be morozov, fixed, or floor");
    s.r = get_double(obj, "r", s.r, "stopping");
    if (!(s.r > 0.0)) throw ConfigError("stopping.r must be positive");
    s.max_iter = get_size(obj, "max_iter", s.max_iter, "stopping");
    if (s.max_iter < 1) throw ConfigError("stopping.max_iter must be >= 1");
    s.final_m = get_size(obj, "final_m", s.final_m, "stopping");
    if (obj.contains("tol")) s.tol = get_double(obj, "tol", 0.0, "stopping");
    if (obj.contains("tol_rel")) s.tol_rel = get_double(obj, "tol_rel", 0.0, "stopping");
    if (s.tol && !(*s.tol > 0.0)) throw ConfigError("stopping.tol must be positive");
    if (s.tol_rel && !(*s.tol_rel > 0.0))
        throw ConfigError("stopping.tol_rel must be positive");
    if (s.rule == "floor") {
        if (s.tol.has_value() == s.tol_rel.has_value())
            throw ConfigError("the floor rule needs exactly one of stopping.tol, "
                              "stopping.tol_rel");
    } else if (s.tol || s.tol_rel) {
        throw ConfigError("stopping.tol/tol_rel apply to the floor rule only");
    }
    return s;
}

inline NoiseConfig parse_noise(const json& obj) {
    if (!obj.is_object()) throw ConfigError("noise must be an object");
    reject_unknown(obj, "noise", {"alpha", "seed", "corrupt_gd", "corrupt_gn"});
    NoiseConfig n;
    n.alpha = get_double(obj, "alpha", n.alpha, "noise");
    if (n.alpha < 0.0) throw ConfigError("noise.alpha must be nonnegative");
    n.seed = get_seed(obj, "seed", n.seed, "noise");
    n.corrupt_gd = get_bool(obj, "corrupt_gd", n.corrupt_gd, "noise");
    if (obj.contains("corrupt_gn"))
        n.corrupt_gn = get_bool(obj, "corrupt_gn", false, "noise");
    return n;
}

inline HeatConfig parse_heat(const json& obj) {
    if (!obj.is_object()) throw ConfigError("heat must be an object");
    reject_unknown(obj, "heat", {"nt", "nx", "t_final", "a", "b", "solution"});
    HeatConfig h;
    h.nt = get_size(obj, "nt", h.nt, "heat");
    h.nx = get_size(obj, "nx", h.nx, "heat");
    if (h.nt < 1 || h.nx < 1) throw ConfigError("heat.nt and heat.nx must be >= 1");
    h.t_final = get_double(obj, "t_final", h.t_final, "heat");
    if (!(h.t_final > 0.0)) throw ConfigError("heat.t_final must be positive");
    h.a = get_double(obj, "a", h.a, "heat");
    h.b = get_double(obj, "b", h.b, "heat");
    if (!(h.a < h.b)) throw ConfigError("heat.a must be < heat.b");
    h.solution = get_string(obj, "solution", h.solution, "heat");
    if (h.solution != "u1" && h.solution != "u2")
        throw ConfigError("heat.solution must be u1 or u2");
    return h;
}

inline EllipticConfig parse_elliptic(const json& obj) {
    if (!obj.is_object()) throw ConfigError("elliptic must be an object");
    reject_unknown(obj, "elliptic",
                   {"synthesis_mesh", "inversion_mesh", "gn_value", "guard"});
    EllipticConfig e;
    if (obj.contains("synthesis_mesh"))
        e.synthesis = parse_mesh_params(obj.at("synthesis_mesh"), "elliptic.synthesis_mesh");
    if (obj.contains("inversion_mesh"))
        e.inversion = parse_mesh_params(obj.at("inversion_mesh"), "elliptic.inversion_mesh");
    if (e.synthesis.nr == e.inversion.nr && e.synthesis.na == e.inversion.na)
        throw InverseCrime("elliptic: synthesis and inversion meshes are identical; "
                           "data must be synthesized on a different mesh");
    e.gn_value = get_double(obj, "gn_value", e.gn_value, "elliptic");
    e.guard = get_double(obj, "guard", e.guard, "elliptic");
    if (!(e.guard > 0.0)) throw ConfigError("elliptic.guard must be positive");
    return e;
}

inline MakeMeshConfig parse_make_mesh(const json& obj) {
    if (!obj.is_object()) throw ConfigError("mesh must be an object");
    reject_unknown(obj, "mesh", {"nr", "na", "file"});
    MakeMeshConfig m;
    m.nr = get_size(obj, "nr", m.nr, "mesh");
    m.na = get_size(obj, "na", m.na, "mesh");
    if (m.nr < 2) throw ConfigError("mesh.nr must be >= 2");
    if (m.na < 8) throw ConfigError("mesh.na must be >= 8");
    m.file = get_string(obj, "file", m.file, "mesh");
    if (m.file.empty()) throw ConfigError("mesh.file must not be empty");
    return m;
}

inline DemoConfig parse_demo(const json& obj) {
    if (!obj.is_object()) throw ConfigError("demo must be an object");
    reject_unknown(obj, "demo", {"n", "count", "seed"});
    DemoConfig d;
    d.n = get_size(obj, "n", d.n, "demo");
    if (d.n < 1) throw ConfigError("demo.n must be >= 1");
    d.count = get_size(obj, "count", d.count, "demo");
    d.seed = get_seed(obj, "seed", d.seed, "demo");
    return d;
}

} // namespace detail

/// Parse a configuration document.  Sections that the selected problem does
/// not read are rejected outright -- a "heat" block in an elliptic config is
/// almost certainly a mistake, not an intention.
inline RunConfig parse_config(const nlohmann::json& doc) {
    using detail::reject_unknown;
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    if (!doc.contains("problem")) throw ConfigError("config needs a \"problem\" key");

    const std::string problem = detail::get_string(doc, "problem", "", "config");
    RunConfig cfg;
    if (problem == "abstract_demo") cfg.problem = ProblemKind::AbstractDemo;
    else if (problem == "heat1d") cfg.problem = ProblemKind::Heat1d;
    else if (problem == "elliptic2d") cfg.problem = ProblemKind::Elliptic2d;
    else if (problem == "make_mesh") cfg.problem = ProblemKind::MakeMesh;
    else
        throw ConfigError("problem must be abstract_demo, heat1d, elliptic2d, or "
                          "make_mesh (got \"" + problem + "\")");

    switch (cfg.problem) {
        case ProblemKind::Heat1d:
            reject_unknown(doc, "config", {"problem", "out", "eps", "stopping", "noise", "heat"});
            break;
        case ProblemKind::Elliptic2d:
            reject_unknown(doc, "config",
                           {"problem", "out", "eps", "stopping", "noise", "elliptic"});
            break;
        case ProblemKind::AbstractDemo:
            reject_unknown(doc, "config", {"problem", "out", "eps", "demo"});
            break;
        case ProblemKind::MakeMesh:
            reject_unknown(doc, "config", {"problem", "out", "mesh"});
            break;
    }

    cfg.out = detail::get_string(doc, "out", cfg.out, "config");
    if (cfg.out.empty()) throw ConfigError("out must not be empty");
    cfg.eps = detail::get_double(doc, "eps", cfg.eps, "config");
    if (!(cfg.eps > 0.0)) throw ConfigError("eps must be positive");

    if (doc.contains("stopping")) cfg.stopping = detail::parse_stopping(doc.at("stopping"));
    if (doc.contains("noise")) cfg.noise = detail::parse_noise(doc.at("noise"));
    if (doc.contains("heat")) cfg.heat = detail::parse_heat(doc.at("heat"));
    if (doc.contains("elliptic")) cfg.elliptic = detail::parse_elliptic(doc.at("elliptic"));
    if (doc.contains("mesh")) cfg.mesh = detail::parse_make_mesh(doc.at("mesh"));
    if (doc.contains("demo")) cfg.demo = detail::parse_demo(doc.at("demo"));

    if (cfg.problem == ProblemKind::Elliptic2d && cfg.corrupt_gn())
        throw ConfigError("noise.corrupt_gn is not supported for elliptic2d: the 2-D "
                          "experiment corrupts the Dirichlet channel only");
    return cfg;
}

/// Load and parse a configuration file.
inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return parse_config(doc);
}

/// Command-line overrides; values are validated the same way the file is.
struct ConfigOverrides {
    std::optional<double> eps;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

inline void apply_overrides(RunConfig& cfg, const ConfigOverrides& ov) {
    if (ov.eps) {
        if (!(*ov.eps > 0.0)) throw ConfigError("--eps must be positive");
        cfg.eps = *ov.eps;
    }
    if (ov.alpha) {
        if (*ov.alpha < 0.0) throw ConfigError("--alpha must be nonnegative");
        cfg.noise.alpha = *ov.alpha;
    }
    if (ov.seed) {
        cfg.noise.seed = *ov.seed;
        cfg.demo.seed = *ov.seed;
    }
    if (ov.out) {
        if (ov.out->empty()) throw ConfigError("--out must not be empty");
        cfg.out = *ov.out;
    }
}

} // namespace iqr
