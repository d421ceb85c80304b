// qrc -- batch front end for the iterated quasi-reversibility solver.
//
//   qrc <subcommand> [--config file.json] [--eps x] [--alpha x] [--seed n] [--out dir]
//
// Subcommands select the experiment (abstract_demo, heat1d, elliptic2d,
// make_mesh); the config file carries everything else and must name the same
// problem as the subcommand.  Without a config the built-in defaults run.
// Exit codes: 0 success, 1 configuration or IO failure, 2 iteration cap hit
// before the stopping rule fired.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <iqr/config.hpp>
#include <iqr/runner.hpp>

namespace {

struct Cli {
    std::string config_path;
    std::optional<double> eps;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common_options(CLI::App& sc, Cli& cli) {
    sc.add_option("--config", cli.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    sc.add_option("--eps", cli.eps, "override the regularization weight");
    sc.add_option("--alpha", cli.alpha, "override the relative noise level");
    sc.add_option("--seed", cli.seed, "override the noise seed");
    sc.add_option("--out", cli.out, "override the output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterated quasi-reversibility batch runner"};
    app.require_subcommand(1);
    Cli cli;
    int rc = 0;
    const std::pair<const char*, iqr::ProblemKind> kinds[] = {
        {"abstract_demo", iqr::ProblemKind::AbstractDemo},
        {"heat1d", iqr::ProblemKind::Heat1d},
        {"elliptic2d", iqr::ProblemKind::Elliptic2d},
        {"make_mesh", iqr::ProblemKind::MakeMesh},
    };
    for (const auto& [name, kind] : kinds) {
        CLI::App* sc = app.add_subcommand(name, std::string("run the ") + name + " problem");
        add_common_options(*sc, cli);
        sc->parse_complete_callback([&cli, &rc, kind = kind]() {
            iqr::RunConfig cfg;
            if (cli.config_path.empty()) {
                cfg.problem = kind;
            } else {
                cfg = iqr::load_config(cli.config_path);
                if (cfg.problem != kind)
                    throw iqr::ConfigError(std::string("config names problem \"") +
                                           iqr::to_string(cfg.problem) +
                                           "\" but the subcommand is \"" +
                                           iqr::to_string(kind) + "\"");
            }
            iqr::apply_overrides(cfg, {cli.eps, cli.alpha, cli.seed, cli.out});
            rc = iqr::run(cfg);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const iqr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
