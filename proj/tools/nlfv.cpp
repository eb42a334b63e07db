#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlfv/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Lax-Friedrichs solver for nonlocal continuity equations"};
    app.require_subcommand(1);

    std::string config_path;
    nlfv::cli::Options opt;
    std::size_t resolution = 0;
    double inject_cfl = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--resolution", resolution, "override the resolution N");
        sub->add_flag("--quiet", opt.quiet, "suppress progress output");
    };
    auto* simulate = app.add_subcommand("simulate", "run one resolution and write the solution");
    auto* converge = app.add_subcommand("converge", "run a mesh-refinement study and write table.csv");
    auto* check = app.add_subcommand("check", "run the randomized invariant suite");
    for (auto* s : {simulate, converge, check}) add_common(s);
    check->add_option("--inject-cfl", inject_cfl, "step with this Courant number (fault injection)");
    check->add_flag("--inject-negative-mass", opt.inject_negative_mass, "seed a negative mass (fault injection)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : nlfv::cli::config_error;
    }
    if (resolution) opt.resolution = resolution;
    if (check->count("--inject-cfl")) opt.inject_cfl = inject_cfl;

    nlfv::io::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = nlfv::io::load_config(config_path);
    } catch (const nlfv::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nlfv::cli::config_error;
    }

    if (*simulate) return nlfv::cli::cmd_simulate(cfg, opt);
    if (*converge) return nlfv::cli::cmd_converge(cfg, opt);
    return nlfv::cli::cmd_check(cfg, opt);
}
