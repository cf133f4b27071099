#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedsched/config.hpp"
#include "fedsched/evaluation.hpp"
#include "fedsched/fedtoy.hpp"
#include "fedsched/optimizer.hpp"

namespace fedsched {

struct RunOptions {
    std::string output_dir_override;  // empty keeps the config's directory
    int parallelism = 1;
    bool plots = true;
};

/// Per-seed world shared by every policy: scenario, generalization targets,
/// and (when the toy federated task is on) the dataset whose shard sizes and
/// qualities overwrite the profiles.
struct SeedContext {
    std::uint64_t seed = 0;
    Scenario scenario;
    GeneralizationSpec spec;
    std::optional<ToyDataset> dataset;
};

SeedContext build_seed_context(const ExperimentConfig& config, std::uint64_t seed);

struct RunResult {
    std::string policy_label;
    std::uint64_t seed = 0;
    std::vector<RoundRecord> records;
    std::vector<RateSnapshot> rate_track;
    RegretSeries regret;
    std::vector<LossPoint> loss_trace;
    std::vector<double> final_rates;
    int rounds_completed = 0;
    double final_clock = 0.0;
    double final_test_mse = 0.0;  // meaningful only when fedtoy ran
    bool fedtoy_ran = false;
    double wall_seconds = 0.0;
};

/// One (policy, seed) simulation with every evaluation the config enables.
RunResult execute_run(const ExperimentConfig& config, const SeedContext& context,
                      const PolicyConfig& policy_config);

/// Full experiment: every (policy, seed) run, metrics/trace CSVs, summary
/// JSON, optional SVG plots. Returns the per-run results in (policy, seed)
/// order.
std::vector<RunResult> run_experiment(const ExperimentConfig& config, const RunOptions& options);

struct RaceOutcome {
    int instances = 0;
    std::int64_t budget = 0;
    std::vector<double> sa_final;
    std::vector<double> alsa_final;
    int alsa_wins_or_ties = 0;
    std::vector<double> mean_sa_current;
    std::vector<double> mean_sa_best;
    std::vector<double> mean_alsa_current;
    std::vector<double> mean_alsa_best;

    double win_or_tie_rate() const {
        return instances == 0 ? 0.0 : static_cast<double>(alsa_wins_or_ties) / instances;
    }
};

/// Seeded head-to-head of the two annealers on frozen random score tables
/// with equal step budgets and a shared initial state per instance.
RaceOutcome run_optimizer_race(const RaceConfig& race);

/// run_optimizer_race plus the race CSVs, summary JSON and optional plot.
RaceOutcome compare_optimizers(const ExperimentConfig& config, const RunOptions& options);

/// Energy trace export (step, current_energy, best_energy, temperature).
/// Requires a trace from a fully observed table so every cell is finite.
void write_anneal_trace_csv(const std::filesystem::path& path,
                            const std::vector<AnnealStep>& trace);

std::filesystem::path metrics_csv_path(const std::filesystem::path& dir,
                                       const std::string& label, std::uint64_t seed);
std::filesystem::path fedtoy_csv_path(const std::filesystem::path& dir, const std::string& label,
                                      std::uint64_t seed);

}  // namespace fedsched
