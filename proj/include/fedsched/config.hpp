#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedsched/environment.hpp"
#include "fedsched/fedtoy.hpp"
#include "fedsched/policies.hpp"

namespace fedsched {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PolicyConfig {
    std::string name;   // bsfl | latency_ucb | random_uniform | random_proportional
    std::string label;  // defaults to name; must be unique per experiment
    std::optional<double> alpha;  // overrides the scheduler's internal objective only
    std::optional<int> beta;
    SolverChoice::Kind solver = SolverChoice::Kind::kExhaustive;
    std::int64_t anneal_steps = 5'000;
    double temperature_scale = 0.0;  // 0 keeps the analytic default
};

struct HorizonConfig {
    std::optional<int> rounds;
    std::optional<double> seconds;
};

struct EvaluationConfig {
    bool regret = true;
    bool fedtoy = false;
    int snapshot_cadence = 0;
    std::optional<double> nominal_delta_min;
};

struct RaceConfig {
    int num_clients = 100;
    int num_channels = 10;
    int instances = 200;
    std::int64_t budget = 5'000;
    double alpha = 1.0;
    // Half-width of the drawn g values. The generalization score lives within
    // |target - rate|^beta of zero once rates settle, so the default mirrors
    // that scale rather than the full [-1, 1] codomain.
    double g_scale = 0.1;
    double temperature_scale = 0.0;
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    ScenarioConfig scenario;
    PartitionMode partition = PartitionMode::kIid;
    ToyDataConfig data;
    std::vector<PolicyConfig> policies;
    HorizonConfig horizon;
    std::vector<std::uint64_t> seeds;
    EvaluationConfig evaluation;
    std::string output_dir = "out";
    std::optional<RaceConfig> race;

    void validate() const;  // throws ConfigError naming the offending field
};

/// Parse and validate a config document. Unknown keys anywhere are errors;
/// parse errors carry the 1-based line number.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config_file(const std::filesystem::path& path);

}  // namespace fedsched
