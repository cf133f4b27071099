// Experiment runner for the bandit client-selection simulator.
//
//   fedsched run <config.json>                 full (policy x seed) sweep
//   fedsched compare-optimizers <config.json>  SA vs ALSA energy race
//   fedsched validate <config.json>            config check only
//
// Outputs land in the config's output_dir (or --output-dir): one metrics CSV
// per (policy, seed), optional federated-toy trace CSVs, summary.json, and
// self-contained SVG plots unless --no-plots.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "fedsched/config.hpp"
#include "fedsched/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bandit client-selection scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    int parallelism = 1;
    bool no_plots = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--output-dir", output_dir, "override the config's output directory");
        cmd->add_flag("--no-plots", no_plots, "skip SVG plot generation");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "execute every (policy, seed) run");
    add_common(run_cmd);
    run_cmd->add_option("--parallelism", parallelism, "worker threads across runs")
        ->check(CLI::PositiveNumber);

    CLI::App* race_cmd =
        app.add_subcommand("compare-optimizers", "race the classic and lightweight annealers");
    add_common(race_cmd);

    CLI::App* validate_cmd = app.add_subcommand("validate", "parse and validate a config");
    validate_cmd->add_option("config", config_path, "experiment config (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    fedsched::ExperimentConfig config;
    try {
        config = fedsched::load_config_file(config_path);
    } catch (const fedsched::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }

    fedsched::RunOptions options;
    options.output_dir_override = output_dir;
    options.parallelism = parallelism;
    options.plots = !no_plots;

    try {
        if (validate_cmd->parsed()) {
            std::printf("ok: %s\n", config_path.c_str());
            return 0;
        }
        if (run_cmd->parsed()) {
            const auto results = fedsched::run_experiment(config, options);
            std::printf("completed %zu runs into %s\n", results.size(),
                        options.output_dir_override.empty() ? config.output_dir.c_str()
                                                            : options.output_dir_override.c_str());
            return 0;
        }
        if (race_cmd->parsed()) {
            const auto outcome = fedsched::compare_optimizers(config, options);
            std::printf("alsa win-or-tie rate: %.4f over %d instances\n",
                        outcome.win_or_tie_rate(), outcome.instances);
            return 0;
        }
    } catch (const fedsched::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
