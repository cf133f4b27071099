#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fedsched/core.hpp"
#include "fedsched/generalization.hpp"

namespace fedsched {

struct AvailabilityConfig {
    enum class Mode { kAll, kBernoulli };
    Mode mode = Mode::kAll;
    double presence_prob = 1.0;
};

/// Ranges the per-client latency-law parameters are drawn from, once, at
/// scenario construction.
struct LatencyLawRanges {
    LatencyFamily family = LatencyFamily::kLogNormal;
    double a_lo = 0.3;  // kFixed: seconds; kLogNormal: log-mean; kExponential: rate
    double a_hi = 1.3;
    double b_lo = 0.25;  // kLogNormal: log-sd
    double b_hi = 0.6;
};

struct ScenarioConfig {
    SystemParams params;
    LatencyLawRanges law_ranges;
    AvailabilityConfig availability;
    std::int64_t data_size_lo = 1;
    std::int64_t data_size_hi = 1;
    double quality_lo = 1.0;
    double quality_hi = 1.0;
    int mu_estimate_samples = 1'000'000;
};

/// The hidden world of one run: fixed client profiles with their true latency
/// laws and cached mean speeds.
struct Scenario {
    SystemParams params;
    std::vector<ClientProfile> profiles;
    AvailabilityConfig availability;

    std::vector<double> mean_speeds() const;
};

/// One simulated round as the evaluator sees it.
struct RoundRecord {
    int round = 0;
    SelectionSet chosen;
    std::vector<double> latencies;
    double iteration_latency = 0.0;
    double realized_reward = 0.0;
    double genie_expected_reward = 0.0;
    double policy_expected_reward = 0.0;
    double cumulative_clock = 0.0;
};

/// One clipped latency draw from the law.
double sample_latency(const LatencyLaw& law, const SystemParams& params, std::mt19937_64& rng);

/// E[tau_min / clip(tau)] for the clipped law; closed form for kFixed,
/// Monte-Carlo with `samples` draws otherwise.
double estimate_mean_speed(const LatencyLaw& law, const SystemParams& params, int samples,
                           std::mt19937_64& rng);

/// Independent clipped draws for each chosen client, in member order.
std::vector<double> sample_round(std::span<const ClientProfile> profiles,
                                 const SelectionSet& chosen, const SystemParams& params,
                                 std::mt19937_64& rng);

/// min(max latency, tau_max); the slowest selected client ends the round.
double iteration_latency(std::span<const double> latencies, const SystemParams& params);

/// Speed term plus scaled generalization term for the round the history is
/// about to complete (history must be pre-observation for that round).
double realized_reward(std::span<const double> latencies, const SelectionSet& chosen,
                       const SelectionHistory& history, const GeneralizationSpec& spec,
                       const SystemParams& params);

/// Client ids available this round. Bernoulli mode resamples whole rounds
/// until at least num_channels clients are present.
std::vector<int> availability(const AvailabilityConfig& config, int num_clients,
                              int num_channels, std::mt19937_64& rng);

/// Draw per-client laws and data fields from the configured ranges and cache
/// each law's mean speed. Streams derive from `seed` alone, so every policy
/// sharing the seed faces the same world.
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace fedsched
