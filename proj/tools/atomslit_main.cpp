#include "atomslit/cli.hpp"
#include "atomslit/errors.hpp"
#include "atomslit/scenario.hpp"
#include "atomslit/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

namespace {

struct GlobalOptions {
    std::string scenario_path;
    std::string out_dir = ".";
    std::string seed;
    std::string samples;
};

atomslit::Scenario make_scenario(const GlobalOptions& g) {
    atomslit::Scenario s = g.scenario_path.empty()
                               ? atomslit::default_scenario()
                               : atomslit::load_scenario_file(g.scenario_path);
    if (!g.seed.empty()) s.seed = std::stoull(g.seed);
    if (!g.samples.empty()) s.dynamics.n_samples = std::stoull(g.samples);
    s.validate();
    return s;
}

void add_common(CLI::App* cmd, GlobalOptions& g) {
    cmd->add_option("--scenario", g.scenario_path, "Scenario JSON file (defaults built in)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", g.out_dir, "Output directory (created if missing)");
    cmd->add_option("--seed", g.seed, "Override scenario seed");
    cmd->add_option("--samples", g.samples, "Override dynamics.n_samples");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-atom recoiling-slit interference simulator"};
    app.set_version_flag("--version", atomslit::tool_version);
    app.require_subcommand(1);

    GlobalOptions g;
    std::string input_path;
    std::size_t bootstrap = 0;

    CLI::App* scan = app.add_subcommand(
        "visibility-scan", "Visibility vs trap depth from the momentum-overlap model");
    add_common(scan, g);

    CLI::App* dyn = app.add_subcommand(
        "dynamics", "Monte Carlo visibility decay and heating under photon scattering");
    add_common(dyn, g);

    CLI::App* thermo = app.add_subcommand(
        "thermometry", "Sideband spectrum synthesis and ratio-method occupation fit");
    add_common(thermo, g);
    thermo->add_option("--input", input_path, "Fit an existing spectrum CSV")
        ->check(CLI::ExistingFile);

    CLI::App* fringe =
        app.add_subcommand("fringe", "Fringe scan synthesis and weighted sinusoid fit");
    add_common(fringe, g);
    fringe->add_option("--input", input_path, "Fit an existing fringe CSV")
        ->check(CLI::ExistingFile);
    fringe->add_option("--bootstrap", bootstrap, "Bootstrap replicates for the fit error");

    CLI::App* lock = app.add_subcommand(
        "lock-sim", "Phase-lock servo residual simulation (closed and open loop)");
    add_common(lock, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const atomslit::Scenario s = make_scenario(g);
        std::optional<std::filesystem::path> input;
        if (!input_path.empty()) input = input_path;

        std::vector<std::string> files;
        if (scan->parsed()) files = atomslit::cli::run_visibility_scan(s, g.out_dir);
        else if (dyn->parsed()) files = atomslit::cli::run_dynamics(s, g.out_dir);
        else if (thermo->parsed()) files = atomslit::cli::run_thermometry(s, input, g.out_dir);
        else if (fringe->parsed())
            files = atomslit::cli::run_fringe(s, input, bootstrap, g.out_dir);
        else if (lock->parsed()) files = atomslit::cli::run_lock_sim(s, g.out_dir);

        for (const auto& f : files) std::printf("wrote %s/%s\n", g.out_dir.c_str(), f.c_str());
        return 0;
    } catch (const atomslit::FitError& e) {
        std::fprintf(stderr, "fit error: %s\n", e.what());
        return 3;
    } catch (const atomslit::ValidationError& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
