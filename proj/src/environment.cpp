#include "fedsched/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedsched/rng.hpp"

namespace fedsched {

namespace {

double raw_latency(const LatencyLaw& law, std::mt19937_64& rng) {
    switch (law.family) {
    case LatencyFamily::kFixed:
        return law.a;
    case LatencyFamily::kLogNormal:
        return std::exp(law.a + law.b * standard_normal(rng));
    case LatencyFamily::kExponential:
        return -std::log1p(-uniform_unit(rng)) / law.a;
    }
    throw std::logic_error("unknown latency family");
}

}  // namespace

double sample_latency(const LatencyLaw& law, const SystemParams& params, std::mt19937_64& rng) {
    return std::clamp(raw_latency(law, rng), params.tau_min, params.tau_max);
}

double estimate_mean_speed(const LatencyLaw& law, const SystemParams& params, int samples,
                           std::mt19937_64& rng) {
    if (law.family == LatencyFamily::kFixed) {
        return speed_of(law.a, params);
    }
    if (samples < 1) {
        throw std::invalid_argument("mean-speed estimation needs at least one sample");
    }
    double total = 0.0;
    for (int i = 0; i < samples; ++i) {
        total += params.tau_min / sample_latency(law, params, rng);
    }
    return total / samples;
}

std::vector<double> sample_round(std::span<const ClientProfile> profiles,
                                 const SelectionSet& chosen, const SystemParams& params,
                                 std::mt19937_64& rng) {
    std::vector<double> latencies;
    latencies.reserve(chosen.members().size());
    for (int k : chosen.members()) {
        latencies.push_back(sample_latency(profiles[static_cast<std::size_t>(k)].law, params, rng));
    }
    return latencies;
}

double iteration_latency(std::span<const double> latencies, const SystemParams& params) {
    if (latencies.empty()) {
        throw std::invalid_argument("iteration latency of an empty selection");
    }
    const double slowest = *std::max_element(latencies.begin(), latencies.end());
    return std::min(slowest, params.tau_max);
}

double realized_reward(std::span<const double> latencies, const SelectionSet& chosen,
                       const SelectionHistory& history, const GeneralizationSpec& spec,
                       const SystemParams& params) {
    if (static_cast<int>(latencies.size()) != chosen.size()) {
        throw std::invalid_argument("one latency per chosen client required");
    }
    double min_speed = 1.0;
    for (double latency : latencies) {
        min_speed = std::min(min_speed, speed_of(latency, params));
    }
    const int round = history.rounds() + 1;
    const double g_term = params.alpha / params.num_channels *
                          g_sum_for_round(spec, history, chosen, round);
    return min_speed + g_term;
}

std::vector<int> availability(const AvailabilityConfig& config, int num_clients,
                              int num_channels, std::mt19937_64& rng) {
    std::vector<int> present;
    present.reserve(static_cast<std::size_t>(num_clients));
    if (config.mode == AvailabilityConfig::Mode::kAll) {
        for (int k = 0; k < num_clients; ++k) {
            present.push_back(k);
        }
        return present;
    }
    while (true) {
        present.clear();
        for (int k = 0; k < num_clients; ++k) {
            if (uniform_unit(rng) < config.presence_prob) {
                present.push_back(k);
            }
        }
        if (static_cast<int>(present.size()) >= num_channels) {
            return present;
        }
    }
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    config.params.validate();
    if (config.availability.mode == AvailabilityConfig::Mode::kBernoulli &&
        !(config.availability.presence_prob > 0.0 && config.availability.presence_prob <= 1.0)) {
        throw std::invalid_argument("availability presence_prob must be in (0, 1]");
    }
    if (config.data_size_lo < 1 || config.data_size_hi < config.data_size_lo) {
        throw std::invalid_argument("data_size range must satisfy 1 <= lo <= hi");
    }
    if (!(config.quality_lo > 0.0) || config.quality_hi > 1.0 ||
        config.quality_hi < config.quality_lo) {
        throw std::invalid_argument("quality range must satisfy 0 < lo <= hi <= 1");
    }

    Scenario scenario;
    scenario.params = config.params;
    scenario.params.rng_seed = seed;
    scenario.availability = config.availability;

    auto draw = make_stream(seed, StreamPurpose::kScenario);
    scenario.profiles.reserve(static_cast<std::size_t>(config.params.num_clients));
    for (int k = 0; k < config.params.num_clients; ++k) {
        ClientProfile profile;
        profile.id = k;
        profile.law.family = config.law_ranges.family;
        profile.law.a = uniform_range(draw, config.law_ranges.a_lo, config.law_ranges.a_hi);
        profile.law.b = uniform_range(draw, config.law_ranges.b_lo, config.law_ranges.b_hi);
        profile.data_size =
            config.data_size_lo +
            static_cast<std::int64_t>(uniform_index(
                draw, static_cast<std::uint64_t>(config.data_size_hi - config.data_size_lo + 1)));
        profile.data_quality = uniform_range(draw, config.quality_lo, config.quality_hi);

        auto mu_stream =
            make_stream(seed, StreamPurpose::kMuEstimate, static_cast<std::uint64_t>(k));
        profile.law.mean_speed = estimate_mean_speed(profile.law, scenario.params,
                                                     config.mu_estimate_samples, mu_stream);
        scenario.profiles.push_back(profile);
    }
    return scenario;
}

std::vector<double> Scenario::mean_speeds() const {
    std::vector<double> mu;
    mu.reserve(profiles.size());
    for (const auto& p : profiles) {
        mu.push_back(p.law.mean_speed);
    }
    return mu;
}

}  // namespace fedsched
