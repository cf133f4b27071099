#include "fedsched/fedtoy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fedsched/rng.hpp"

namespace fedsched {

namespace {

void fill_gaussian(std::vector<double>& out, double sd, std::mt19937_64& rng) {
    for (double& x : out) {
        x = sd * standard_normal(rng);
    }
}

std::vector<int> shard_sizes(const ToyDataConfig& config, int num_clients, PartitionMode mode,
                             std::mt19937_64& rng) {
    std::vector<int> sizes(static_cast<std::size_t>(num_clients), 0);
    if (mode == PartitionMode::kIid) {
        for (int k = 0; k < num_clients; ++k) {
            sizes[static_cast<std::size_t>(k)] = config.train_samples / num_clients;
        }
    } else {
        // Sizes proportional to weights drawn from [1, size_spread].
        std::vector<double> weight(static_cast<std::size_t>(num_clients));
        double total = 0.0;
        for (double& w : weight) {
            w = uniform_range(rng, 1.0, std::max(1.0, config.size_spread));
            total += w;
        }
        for (int k = 0; k < num_clients; ++k) {
            sizes[static_cast<std::size_t>(k)] = std::max(
                1, static_cast<int>(config.train_samples * weight[static_cast<std::size_t>(k)] /
                                    total));
        }
    }
    return sizes;
}

}  // namespace

ToyDataset make_toy_dataset(const ToyDataConfig& config, int num_clients, PartitionMode mode,
                            std::mt19937_64& rng) {
    if (config.dim < 1 || config.train_samples < num_clients || config.test_samples < 1) {
        throw std::invalid_argument("toy dataset configuration is degenerate");
    }
    if (num_clients < 1) {
        throw std::invalid_argument("toy dataset needs at least one client");
    }

    ToyDataset dataset;
    dataset.dim = config.dim;
    dataset.true_weights.resize(static_cast<std::size_t>(config.dim));
    fill_gaussian(dataset.true_weights, config.weight_scale, rng);

    const std::vector<int> sizes = shard_sizes(config, num_clients, mode, rng);
    dataset.shards.reserve(static_cast<std::size_t>(num_clients));
    for (int k = 0; k < num_clients; ++k) {
        ClientShard shard;
        shard.size = sizes[static_cast<std::size_t>(k)];
        shard.noise_sd = mode == PartitionMode::kIid
                             ? config.noise_sd
                             : uniform_range(rng, config.noise_sd_lo, config.noise_sd_hi);
        shard.quality = 1.0 / (1.0 + shard.noise_sd);
        shard.features.resize(static_cast<std::size_t>(shard.size) *
                              static_cast<std::size_t>(config.dim));
        fill_gaussian(shard.features, config.feature_sd, rng);
        shard.targets.resize(static_cast<std::size_t>(shard.size));
        for (int i = 0; i < shard.size; ++i) {
            double y = 0.0;
            for (int j = 0; j < config.dim; ++j) {
                y += shard.features[static_cast<std::size_t>(i) * config.dim + j] *
                     dataset.true_weights[static_cast<std::size_t>(j)];
            }
            shard.targets[static_cast<std::size_t>(i)] =
                y + shard.noise_sd * standard_normal(rng);
        }
        dataset.shards.push_back(std::move(shard));
    }

    dataset.test_features.resize(static_cast<std::size_t>(config.test_samples) *
                                 static_cast<std::size_t>(config.dim));
    fill_gaussian(dataset.test_features, config.feature_sd, rng);
    dataset.test_targets.resize(static_cast<std::size_t>(config.test_samples));
    for (int i = 0; i < config.test_samples; ++i) {
        double y = 0.0;
        for (int j = 0; j < config.dim; ++j) {
            y += dataset.test_features[static_cast<std::size_t>(i) * config.dim + j] *
                 dataset.true_weights[static_cast<std::size_t>(j)];
        }
        dataset.test_targets[static_cast<std::size_t>(i)] = y;
    }
    return dataset;
}

double mean_squared_error(std::span<const double> weights, std::span<const double> features,
                          std::span<const double> targets, int dim) {
    if (targets.empty()) {
        throw std::invalid_argument("mean squared error over an empty sample");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        double prediction = 0.0;
        for (int j = 0; j < dim; ++j) {
            prediction += features[i * static_cast<std::size_t>(dim) +
                                   static_cast<std::size_t>(j)] *
                          weights[static_cast<std::size_t>(j)];
        }
        const double residual = prediction - targets[i];
        total += residual * residual;
    }
    return total / static_cast<double>(targets.size());
}

std::vector<double> mse_gradient(std::span<const double> weights, const ClientShard& shard,
                                 int dim) {
    std::vector<double> gradient(static_cast<std::size_t>(dim), 0.0);
    for (int i = 0; i < shard.size; ++i) {
        double prediction = 0.0;
        const std::size_t row = static_cast<std::size_t>(i) * static_cast<std::size_t>(dim);
        for (int j = 0; j < dim; ++j) {
            prediction += shard.features[row + static_cast<std::size_t>(j)] *
                          weights[static_cast<std::size_t>(j)];
        }
        const double residual = prediction - shard.targets[static_cast<std::size_t>(i)];
        for (int j = 0; j < dim; ++j) {
            gradient[static_cast<std::size_t>(j)] +=
                residual * shard.features[row + static_cast<std::size_t>(j)];
        }
    }
    const double scale = 2.0 / shard.size;
    for (double& g : gradient) {
        g *= scale;
    }
    return gradient;
}

std::vector<double> local_train(std::span<const double> weights, const ClientShard& shard,
                                int dim, int steps, double learning_rate) {
    if (shard.size < 1) {
        throw std::invalid_argument("local training needs a non-empty shard");
    }
    std::vector<double> w(weights.begin(), weights.end());
    for (int s = 0; s < steps; ++s) {
        const std::vector<double> gradient = mse_gradient(w, shard, dim);
        for (int j = 0; j < dim; ++j) {
            w[static_cast<std::size_t>(j)] -=
                learning_rate * gradient[static_cast<std::size_t>(j)];
        }
    }
    return w;
}

GlobalModel aggregate(std::span<const std::vector<double>> locals,
                      std::span<const std::int64_t> sizes, int round) {
    if (locals.empty() || locals.size() != sizes.size()) {
        throw std::invalid_argument("aggregation needs one weight vector per participant size");
    }
    GlobalModel model;
    model.round = round;
    model.weights.assign(locals.front().size(), 0.0);
    double total = 0.0;
    for (std::int64_t s : sizes) {
        if (s < 1) {
            throw std::invalid_argument("participant sizes must be positive");
        }
        total += static_cast<double>(s);
    }
    for (std::size_t p = 0; p < locals.size(); ++p) {
        const double share = static_cast<double>(sizes[p]) / total;
        if (locals[p].size() != model.weights.size()) {
            throw std::invalid_argument("participant weight vectors disagree in dimension");
        }
        for (std::size_t j = 0; j < model.weights.size(); ++j) {
            model.weights[j] += share * locals[p][j];
        }
    }
    return model;
}

FlRunResult run_fl(const ToyDataset& dataset, Policy& policy, const Scenario& scenario,
                   const ToyDataConfig& config, double budget_seconds,
                   std::mt19937_64& env_rng, std::mt19937_64& availability_rng) {
    if (!(budget_seconds > 0.0)) {
        throw std::invalid_argument("simulated-time budget must be positive");
    }
    FlRunResult result;
    result.model.weights.assign(static_cast<std::size_t>(dataset.dim), 0.0);

    double clock = 0.0;
    for (int round = 1;; ++round) {
        const std::vector<int> present =
            availability(scenario.availability, scenario.params.num_clients,
                         scenario.params.num_channels, availability_rng);
        const SelectionSet chosen = policy.select(present, round);
        const std::vector<double> latencies =
            sample_round(scenario.profiles, chosen, scenario.params, env_rng);
        const double tau = iteration_latency(latencies, scenario.params);
        if (clock + tau > budget_seconds) {
            break;
        }

        std::vector<std::vector<double>> locals;
        std::vector<std::int64_t> sizes;
        locals.reserve(chosen.members().size());
        sizes.reserve(chosen.members().size());
        for (int k : chosen.members()) {
            const ClientShard& shard = dataset.shards[static_cast<std::size_t>(k)];
            locals.push_back(local_train(result.model.weights, shard, dataset.dim,
                                         config.local_steps, config.learning_rate));
            sizes.push_back(shard.size);
        }
        result.model = aggregate(locals, sizes, round);

        policy.observe(chosen, latencies, round);
        clock += tau;
        result.trace.push_back({clock, round,
                                mean_squared_error(result.model.weights, dataset.test_features,
                                                   dataset.test_targets, dataset.dim)});
        result.rounds_completed = round;
        result.final_clock = clock;
    }
    return result;
}

}  // namespace fedsched
