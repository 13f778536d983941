// sbthermo CLI: run / validate / scan / plots.
// Exit codes: 0 success, 1 physics or validation failure, 2 configuration error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sbthermo/config.hpp"
#include "sbthermo/runner.hpp"

namespace {

sbt::RunConfig load_config(const std::string& path, const std::string& preset,
                           const std::string& out_dir) {
    sbt::RunConfig cfg;
    if (!preset.empty()) {
        cfg = sbt::RunConfig::from_preset(preset);
    } else if (!path.empty()) {
        cfg = sbt::RunConfig::from_file(path);
    } else {
        throw sbt::ConfigError("either a config file or --preset is required");
    }
    if (!out_dir.empty()) cfg.output_directory = out_dir;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-boson quantum thermodynamics via the hierarchical equations of motion"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, plots_dir;
    bool fast = false;

    auto* run_cmd = app.add_subcommand("run", "execute a scenario and write the artifact bundle");
    run_cmd->add_option("config", config_path, "key = value configuration file");
    run_cmd->add_option("--preset", preset,
                        "scenario preset: unbiased-nonadiabatic | biased-nonadiabatic | "
                        "biased-adiabatic");
    run_cmd->add_option("--out", out_dir, "output directory override");

    auto* validate_cmd = app.add_subcommand("validate", "run the oracle and invariant suites");
    validate_cmd->add_flag("--fast", fast, "smaller validation settings");

    auto* scan_cmd = app.add_subcommand("scan", "convergence scan around the configured settings");
    scan_cmd->add_option("config", config_path, "key = value configuration file");
    scan_cmd->add_option("--preset", preset, "scenario preset");
    scan_cmd->add_option("--out", out_dir, "output directory override");

    auto* plots_cmd = app.add_subcommand("plots", "emit plot scripts for a completed run");
    plots_cmd->add_option("dir", plots_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const sbt::RunConfig cfg = load_config(config_path, preset, out_dir);
            return sbt::run_scenario(cfg, std::cout);
        }
        if (validate_cmd->parsed()) {
            return sbt::run_validation(std::cout, fast);
        }
        if (scan_cmd->parsed()) {
            const sbt::RunConfig cfg = load_config(config_path, preset, out_dir);
            return sbt::run_scan(cfg, std::cout);
        }
        if (plots_cmd->parsed()) {
            return sbt::emit_plots(plots_dir, std::cout);
        }
    } catch (const sbt::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
