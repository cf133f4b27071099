#include "fedsched/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedsched/rng.hpp"

namespace fedsched {

Policy::Policy(std::string label, const SystemParams& params)
    : params_(params), label_(std::move(label)), history_(params.num_clients) {
    params_.validate();
}

void Policy::check_round(std::span<const int> available, int round) const {
    if (round != history_.rounds() + 1) {
        throw std::logic_error("rounds must be played in order");
    }
    if (static_cast<int>(available.size()) < params_.num_channels) {
        throw std::runtime_error("fewer available clients than channels");
    }
}

void Policy::observe(const SelectionSet& chosen, std::span<const double> latencies, int round) {
    if (round != history_.rounds() + 1) {
        throw std::logic_error("observation for an unexpected round");
    }
    if (static_cast<int>(latencies.size()) != chosen.size()) {
        throw std::invalid_argument("one latency per chosen client required");
    }
    history_.advance_round();
    for (std::size_t i = 0; i < latencies.size(); ++i) {
        record_observation(history_, chosen.members()[i], latencies[i], params_);
    }
}

BsflPolicy::BsflPolicy(std::string label, const SystemParams& params, GeneralizationSpec spec,
                       SolverChoice solver, std::mt19937_64 solver_rng,
                       std::optional<double> alpha_override)
    : Policy(std::move(label), params),
      spec_(std::move(spec)),
      solver_(solver),
      rng_(solver_rng),
      effective_alpha_(alpha_override.value_or(params.alpha)),
      ucb_(static_cast<std::size_t>(params.num_clients), std::nullopt) {
    spec_.validate();
    if (static_cast<int>(spec_.target_rate.size()) != params.num_clients) {
        throw std::invalid_argument("generalization spec covers a different client count");
    }
    if (!(effective_alpha_ >= 0.0)) {
        throw std::invalid_argument("alpha must be >= 0");
    }
}

ScoreTable BsflPolicy::score_table(std::span<const int> available, int round) const {
    ScoreTable table;
    table.num_clients = params_.num_clients;
    table.subset_size = params_.num_channels;
    table.alpha = effective_alpha_;
    table.score = ucb_;
    table.g.reserve(static_cast<std::size_t>(params_.num_clients));
    for (int k = 0; k < params_.num_clients; ++k) {
        table.g.push_back(g_value_for_round(spec_, history_, k, round));
    }
    table.available.assign(available.begin(), available.end());
    return table;
}

SelectionSet BsflPolicy::select(std::span<const int> available, int round) {
    check_round(available, round);
    const ScoreTable table = score_table(available, round);
    switch (solver_.kind) {
    case SolverChoice::Kind::kExhaustive:
        return solve_exhaustive(table, solver_.enumeration_cap);
    case SolverChoice::Kind::kSa: {
        AnnealerConfig config = solver_.annealer;
        config.neighborhood = Neighborhood::kClassic;
        return anneal(table, config, rng_).best;
    }
    case SolverChoice::Kind::kAlsa: {
        AnnealerConfig config = solver_.annealer;
        config.neighborhood = Neighborhood::kLightweight;
        return anneal(table, config, rng_).best;
    }
    }
    throw std::logic_error("unknown solver kind");
}

void BsflPolicy::observe(const SelectionSet& chosen, std::span<const double> latencies,
                         int round) {
    Policy::observe(chosen, latencies, round);
    const double log_round = std::log(static_cast<double>(history_.rounds()));
    for (int k = 0; k < params_.num_clients; ++k) {
        if (!history_.observed(k)) {
            continue;
        }
        const double radius =
            std::sqrt((params_.num_channels + 1) * log_round / history_.count(k));
        ucb_[static_cast<std::size_t>(k)] = history_.mean_speed(k) + radius;
    }
}

std::optional<double> BsflPolicy::ucb(int client) const {
    return ucb_.at(static_cast<std::size_t>(client));
}

std::unique_ptr<BsflPolicy> make_latency_ucb_policy(const SystemParams& params,
                                                    GeneralizationSpec spec, SolverChoice solver,
                                                    std::mt19937_64 solver_rng) {
    return std::make_unique<BsflPolicy>("latency_ucb", params, std::move(spec), solver,
                                        solver_rng, 0.0);
}

RandomUniformPolicy::RandomUniformPolicy(std::string label, const SystemParams& params,
                                         std::mt19937_64 rng)
    : Policy(std::move(label), params), rng_(rng) {}

SelectionSet RandomUniformPolicy::select(std::span<const int> available, int round) {
    check_round(available, round);
    return uniform_subset(available, params_.num_channels, rng_);
}

RandomProportionalPolicy::RandomProportionalPolicy(std::string label, const SystemParams& params,
                                                   std::vector<double> weights,
                                                   std::mt19937_64 rng)
    : Policy(std::move(label), params), weights_(std::move(weights)), rng_(rng) {
    if (static_cast<int>(weights_.size()) != params_.num_clients) {
        throw std::invalid_argument("one weight per client required");
    }
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("proportional sampling needs positive finite weights");
        }
    }
}

SelectionSet RandomProportionalPolicy::select(std::span<const int> available, int round) {
    check_round(available, round);
    std::vector<int> pool(available.begin(), available.end());
    std::vector<double> weight;
    weight.reserve(pool.size());
    for (int k : pool) {
        weight.push_back(weights_[static_cast<std::size_t>(k)]);
    }
    std::vector<int> members;
    members.reserve(static_cast<std::size_t>(params_.num_channels));
    for (int i = 0; i < params_.num_channels; ++i) {
        double total = 0.0;
        for (double w : weight) {
            total += w;
        }
        const double u = uniform_unit(rng_) * total;
        double prefix = 0.0;
        std::size_t pick = weight.size() - 1;
        for (std::size_t j = 0; j < weight.size(); ++j) {
            prefix += weight[j];
            if (u < prefix) {
                pick = j;
                break;
            }
        }
        members.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return SelectionSet(std::move(members));
}

double expected_set_reward(const SelectionSet& set, std::span<const double> mu,
                           const SelectionHistory& history, const GeneralizationSpec& spec,
                           const SystemParams& params) {
    double min_mu = mu[static_cast<std::size_t>(set.members().front())];
    for (int k : set.members()) {
        min_mu = std::min(min_mu, mu[static_cast<std::size_t>(k)]);
    }
    const int round = history.rounds() + 1;
    return min_mu + params.alpha / params.num_channels *
                        g_sum_for_round(spec, history, set, round);
}

GenieResult genie_select(std::span<const double> mu, const SelectionHistory& history,
                         const GeneralizationSpec& spec, std::span<const int> available,
                         const SystemParams& params, std::int64_t cap) {
    if (static_cast<int>(mu.size()) != params.num_clients) {
        throw std::invalid_argument("one mean speed per client required");
    }
    ScoreTable table;
    table.num_clients = params.num_clients;
    table.subset_size = params.num_channels;
    table.alpha = params.alpha;
    table.score.reserve(mu.size());
    for (double value : mu) {
        table.score.emplace_back(value);
    }
    const int round = history.rounds() + 1;
    table.g.reserve(mu.size());
    for (int k = 0; k < params.num_clients; ++k) {
        table.g.push_back(g_value_for_round(spec, history, k, round));
    }
    table.available.assign(available.begin(), available.end());

    GenieResult result;
    result.set = solve_exhaustive(table, cap);
    result.expected_reward = energy(result.set, table).value();
    return result;
}

}  // namespace fedsched
