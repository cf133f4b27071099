#pragma once

#include <random>
#include <span>
#include <vector>

#include "fedsched/core.hpp"
#include "fedsched/environment.hpp"
#include "fedsched/generalization.hpp"
#include "fedsched/policies.hpp"

namespace fedsched {

/// Synthetic linear-regression data: y = w* . x + noise on the training
/// shards; test targets are noise-free so test MSE reads as excess risk.
struct ToyDataConfig {
    int dim = 10;
    int train_samples = 70'000;
    int test_samples = 20'000;
    double feature_sd = 1.0;
    double weight_scale = 1.0;
    double noise_sd = 1.0;       // iid partition: every shard
    double noise_sd_lo = 0.25;   // non-iid partition: per-shard range
    double noise_sd_hi = 2.5;
    double size_spread = 4.0;    // non-iid: largest-to-smallest shard ratio
    int local_steps = 5;
    double learning_rate = 0.05;
};

enum class PartitionMode { kIid, kNonIid };

struct ClientShard {
    std::vector<double> features;  // row-major, size * dim
    std::vector<double> targets;
    int size = 0;
    double noise_sd = 0.0;
    double quality = 1.0;  // 1 / (1 + noise_sd)
};

struct ToyDataset {
    int dim = 0;
    std::vector<ClientShard> shards;
    std::vector<double> test_features;
    std::vector<double> test_targets;
    std::vector<double> true_weights;
};

ToyDataset make_toy_dataset(const ToyDataConfig& config, int num_clients, PartitionMode mode,
                            std::mt19937_64& rng);

struct GlobalModel {
    std::vector<double> weights;
    int round = 0;
};

/// Mean squared error of the linear model over (features, targets).
double mean_squared_error(std::span<const double> weights, std::span<const double> features,
                          std::span<const double> targets, int dim);

/// d MSE / d w over the shard: (2/n) X^T (X w - y).
std::vector<double> mse_gradient(std::span<const double> weights, const ClientShard& shard,
                                 int dim);

/// Full-batch gradient descent on the shard's MSE from the given start.
std::vector<double> local_train(std::span<const double> weights, const ClientShard& shard,
                                int dim, int steps, double learning_rate);

/// Size-weighted average of the participants' weight vectors.
GlobalModel aggregate(std::span<const std::vector<double>> locals,
                      std::span<const std::int64_t> sizes, int round);

struct LossPoint {
    double clock = 0.0;
    int round = 0;
    double test_loss = 0.0;
};

struct FlRunResult {
    std::vector<LossPoint> trace;
    GlobalModel model;
    int rounds_completed = 0;
    double final_clock = 0.0;
};

/// Federated loop under a simulated-seconds budget: select, sample latencies,
/// train the chosen shards, aggregate, advance the clock by the slowest
/// participant. A round that would land past the budget is discarded whole.
FlRunResult run_fl(const ToyDataset& dataset, Policy& policy, const Scenario& scenario,
                   const ToyDataConfig& config, double budget_seconds,
                   std::mt19937_64& env_rng, std::mt19937_64& availability_rng);

}  // namespace fedsched
