#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <numeric>
#include <vector>

#include "fedsched/fedtoy.hpp"
#include "fedsched/rng.hpp"

using namespace fedsched;

namespace {

ToyDataConfig small_config() {
    ToyDataConfig config;
    config.dim = 4;
    config.train_samples = 800;
    config.test_samples = 500;
    config.noise_sd = 0.5;
    config.local_steps = 5;
    config.learning_rate = 0.05;
    return config;
}

// Oracle-driven policy: solves the exact selection argmax with the true mean
// speeds against its own running history.
class GeniePolicy : public Policy {
  public:
    GeniePolicy(const SystemParams& params, GeneralizationSpec spec, std::vector<double> mu)
        : Policy("genie", params), spec_(std::move(spec)), mu_(std::move(mu)) {}

    SelectionSet select(std::span<const int> available, int round) override {
        (void)round;
        return genie_select(mu_, history_, spec_, available, params_).set;
    }

  private:
    GeneralizationSpec spec_;
    std::vector<double> mu_;
};

// Closed-form least squares on pooled data via Gaussian elimination.
std::vector<double> least_squares(const std::vector<const ClientShard*>& shards, int dim) {
    std::vector<double> normal(static_cast<std::size_t>(dim) * dim, 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(dim), 0.0);
    for (const ClientShard* shard : shards) {
        for (int i = 0; i < shard->size; ++i) {
            const std::size_t row = static_cast<std::size_t>(i) * dim;
            for (int a = 0; a < dim; ++a) {
                const double xa = shard->features[row + static_cast<std::size_t>(a)];
                rhs[static_cast<std::size_t>(a)] += xa * shard->targets[static_cast<std::size_t>(i)];
                for (int b = 0; b < dim; ++b) {
                    normal[static_cast<std::size_t>(a) * dim + b] +=
                        xa * shard->features[row + static_cast<std::size_t>(b)];
                }
            }
        }
    }
    // solve normal * w = rhs
    std::vector<double> w = rhs;
    for (int col = 0; col < dim; ++col) {
        int pivot = col;
        for (int r = col + 1; r < dim; ++r) {
            if (std::abs(normal[static_cast<std::size_t>(r) * dim + col]) >
                std::abs(normal[static_cast<std::size_t>(pivot) * dim + col])) {
                pivot = r;
            }
        }
        for (int c = 0; c < dim; ++c) {
            std::swap(normal[static_cast<std::size_t>(col) * dim + c],
                      normal[static_cast<std::size_t>(pivot) * dim + c]);
        }
        std::swap(w[static_cast<std::size_t>(col)], w[static_cast<std::size_t>(pivot)]);
        const double lead = normal[static_cast<std::size_t>(col) * dim + col];
        for (int r = 0; r < dim; ++r) {
            if (r == col) {
                continue;
            }
            const double factor = normal[static_cast<std::size_t>(r) * dim + col] / lead;
            for (int c = 0; c < dim; ++c) {
                normal[static_cast<std::size_t>(r) * dim + c] -=
                    factor * normal[static_cast<std::size_t>(col) * dim + c];
            }
            w[static_cast<std::size_t>(r)] -= factor * w[static_cast<std::size_t>(col)];
        }
    }
    for (int r = 0; r < dim; ++r) {
        w[static_cast<std::size_t>(r)] /= normal[static_cast<std::size_t>(r) * dim + r];
    }
    return w;
}

}  // namespace

TEST_CASE("dataset generation matches the partition contract") {
    auto rng = make_stream(71, StreamPurpose::kDataset);
    const auto config = small_config();

    SUBCASE("iid shards are equal-sized with one noise level") {
        const auto data = make_toy_dataset(config, 8, PartitionMode::kIid, rng);
        REQUIRE(data.shards.size() == 8);
        for (const auto& shard : data.shards) {
            CHECK(shard.size == 100);
            CHECK(shard.noise_sd == config.noise_sd);
            CHECK(shard.quality == doctest::Approx(1.0 / 1.5));
            CHECK(shard.features.size() == static_cast<std::size_t>(shard.size) * 4);
        }
        CHECK(data.test_targets.size() == 500);
    }
    SUBCASE("non-iid shards vary in size and quality") {
        const auto data = make_toy_dataset(config, 8, PartitionMode::kNonIid, rng);
        int min_size = data.shards.front().size;
        int max_size = min_size;
        bool quality_varies = false;
        for (const auto& shard : data.shards) {
            min_size = std::min(min_size, shard.size);
            max_size = std::max(max_size, shard.size);
            CHECK(shard.quality == doctest::Approx(1.0 / (1.0 + shard.noise_sd)));
            if (shard.noise_sd != data.shards.front().noise_sd) {
                quality_varies = true;
            }
        }
        CHECK(max_size > min_size);
        CHECK(quality_varies);
    }
    SUBCASE("test targets are the clean linear responses") {
        const auto data = make_toy_dataset(config, 4, PartitionMode::kIid, rng);
        for (int i = 0; i < 20; ++i) {
            double expected = 0.0;
            for (int j = 0; j < 4; ++j) {
                expected += data.test_features[static_cast<std::size_t>(i) * 4 + j] *
                            data.true_weights[static_cast<std::size_t>(j)];
            }
            CHECK(data.test_targets[static_cast<std::size_t>(i)] == doctest::Approx(expected));
        }
    }
}

TEST_CASE("zero training steps leave the weights untouched") {
    auto rng = make_stream(72, StreamPurpose::kDataset);
    const auto data = make_toy_dataset(small_config(), 4, PartitionMode::kIid, rng);
    const std::vector<double> start{0.1, -0.2, 0.3, 0.0};
    CHECK(local_train(start, data.shards[0], 4, 0, 0.05) == start);
}

TEST_CASE("local training descends the shard loss") {
    auto rng = make_stream(73, StreamPurpose::kDataset);
    auto config = small_config();
    config.noise_sd = 0.0;  // noiseless shard: the loss can approach zero
    const auto data = make_toy_dataset(config, 4, PartitionMode::kIid, rng);
    const ClientShard& shard = data.shards[0];

    std::vector<double> w(4, 0.0);
    double previous = mean_squared_error(w, shard.features, shard.targets, 4);
    for (int step = 0; step < 25; ++step) {
        w = local_train(w, shard, 4, 1, 0.05);
        const double current = mean_squared_error(w, shard.features, shard.targets, 4);
        CHECK(current < previous);
        previous = current;
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    auto rng = make_stream(74, StreamPurpose::kDataset);
    const auto data = make_toy_dataset(small_config(), 4, PartitionMode::kNonIid, rng);
    const ClientShard& shard = data.shards[1];

    std::vector<double> w{0.4, -1.1, 0.7, 0.2};
    const auto gradient = mse_gradient(w, shard, 4);
    const double h = 1e-6;
    for (int j = 0; j < 4; ++j) {
        auto plus = w;
        auto minus = w;
        plus[static_cast<std::size_t>(j)] += h;
        minus[static_cast<std::size_t>(j)] -= h;
        const double fd = (mean_squared_error(plus, shard.features, shard.targets, 4) -
                           mean_squared_error(minus, shard.features, shard.targets, 4)) /
                          (2.0 * h);
        const double relative =
            std::abs(fd - gradient[static_cast<std::size_t>(j)]) /
            std::max(1e-12, std::abs(fd));
        CHECK(relative < 1e-5);
    }
}

TEST_CASE("aggregation is the size-weighted mean") {
    SUBCASE("single participant passes through") {
        const std::vector<std::vector<double>> locals{{0.5, -0.25}};
        const std::vector<std::int64_t> sizes{7};
        CHECK(aggregate(locals, sizes, 3).weights == locals[0]);
    }
    SUBCASE("identical inputs are a fixed point") {
        const std::vector<std::vector<double>> locals{{0.5, -0.25}, {0.5, -0.25}, {0.5, -0.25}};
        const std::vector<std::int64_t> sizes{1, 10, 100};
        CHECK(aggregate(locals, sizes, 1).weights == locals[0]);
    }
    SUBCASE("sizes (1, 3) with weights w and 0 give w/4") {
        const std::vector<std::vector<double>> locals{{1.0, -2.0}, {0.0, 0.0}};
        const std::vector<std::int64_t> sizes{1, 3};
        const auto model = aggregate(locals, sizes, 1);
        CHECK(model.weights == std::vector<double>({0.25, -0.5}));
    }
    SUBCASE("participant order does not matter") {
        const std::vector<std::vector<double>> ab{{1.0, 0.0}, {0.0, 2.0}};
        const std::vector<std::int64_t> sizes_ab{2, 6};
        const std::vector<std::vector<double>> ba{{0.0, 2.0}, {1.0, 0.0}};
        const std::vector<std::int64_t> sizes_ba{6, 2};
        const auto left = aggregate(ab, sizes_ab, 1).weights;
        const auto right = aggregate(ba, sizes_ba, 1).weights;
        for (std::size_t j = 0; j < left.size(); ++j) {
            CHECK(left[j] == doctest::Approx(right[j]).epsilon(1e-15));
        }
    }
    SUBCASE("argument mismatches are rejected") {
        CHECK_THROWS_AS(aggregate({}, {}, 1), std::invalid_argument);
        const std::vector<std::vector<double>> locals{{1.0}};
        CHECK_THROWS_AS(aggregate(locals, std::vector<std::int64_t>{0}, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("federated loop respects the simulated budget") {
    const auto config = small_config();
    SystemParams params;
    params.num_clients = 4;
    params.num_channels = 2;
    params.tau_min = 1.0;
    params.tau_max = 10.0;

    Scenario scenario;
    scenario.params = params;
    for (int k = 0; k < 4; ++k) {
        ClientProfile profile;
        profile.id = k;
        profile.law.family = LatencyFamily::kFixed;
        profile.law.a = 2.0;
        profile.law.mean_speed = 0.5;
        scenario.profiles.push_back(profile);
    }

    auto data_rng = make_stream(75, StreamPurpose::kDataset);
    const auto data = make_toy_dataset(config, 4, PartitionMode::kIid, data_rng);

    SUBCASE("budget below tau_min completes zero rounds") {
        RandomUniformPolicy policy("random_uniform", params,
                                   make_stream(76, StreamPurpose::kPolicy));
        auto env = make_stream(76, StreamPurpose::kEnvironment);
        auto avail = make_stream(76, StreamPurpose::kAvailability);
        const auto run = run_fl(data, policy, scenario, config, 0.5, env, avail);
        CHECK(run.rounds_completed == 0);
        CHECK(run.trace.empty());
    }
    SUBCASE("clock is the exact prefix sum of fixed latencies") {
        RandomUniformPolicy policy("random_uniform", params,
                                   make_stream(77, StreamPurpose::kPolicy));
        auto env = make_stream(77, StreamPurpose::kEnvironment);
        auto avail = make_stream(77, StreamPurpose::kAvailability);
        const auto run = run_fl(data, policy, scenario, config, 21.0, env, avail);
        CHECK(run.rounds_completed == 10);  // fixed 2-second rounds
        for (std::size_t i = 0; i < run.trace.size(); ++i) {
            CHECK(run.trace[i].clock == 2.0 * (static_cast<double>(i) + 1.0));
        }
    }
    SUBCASE("identical seeds give bit-identical traces") {
        auto run_once = [&]() {
            RandomUniformPolicy policy("random_uniform", params,
                                       make_stream(78, StreamPurpose::kPolicy));
            auto env = make_stream(78, StreamPurpose::kEnvironment);
            auto avail = make_stream(78, StreamPurpose::kAvailability);
            return run_fl(data, policy, scenario, config, 30.0, env, avail);
        };
        const auto a = run_once();
        const auto b = run_once();
        REQUIRE(a.trace.size() == b.trace.size());
        for (std::size_t i = 0; i < a.trace.size(); ++i) {
            CHECK(a.trace[i].clock == b.trace[i].clock);
            CHECK(a.trace[i].test_loss == b.trace[i].test_loss);
        }
        CHECK(a.model.weights == b.model.weights);
    }
}

TEST_CASE("identical shards collapse federated training to a single client") {
    auto rng = make_stream(79, StreamPurpose::kDataset);
    auto config = small_config();
    const auto base = make_toy_dataset(config, 1, PartitionMode::kIid, rng);

    ToyDataset cloned = base;
    cloned.shards = {base.shards[0], base.shards[0], base.shards[0]};

    std::vector<double> federated(4, 0.0);
    std::vector<double> solo(4, 0.0);
    for (int round = 0; round < 10; ++round) {
        std::vector<std::vector<double>> locals;
        std::vector<std::int64_t> sizes;
        for (const auto& shard : cloned.shards) {
            locals.push_back(local_train(federated, shard, 4, config.local_steps,
                                         config.learning_rate));
            sizes.push_back(shard.size);
        }
        federated = aggregate(locals, sizes, round + 1).weights;
        solo = local_train(solo, base.shards[0], 4, config.local_steps, config.learning_rate);
        for (int j = 0; j < 4; ++j) {
            CHECK(federated[static_cast<std::size_t>(j)] ==
                  doctest::Approx(solo[static_cast<std::size_t>(j)]).epsilon(1e-10));
        }
    }
}

TEST_CASE("a well-fed run lands near the pooled least-squares loss") {
    auto rng = make_stream(80, StreamPurpose::kDataset);
    auto config = small_config();
    config.train_samples = 2000;
    config.learning_rate = 0.08;
    const auto data = make_toy_dataset(config, 4, PartitionMode::kIid, rng);

    SystemParams params;
    params.num_clients = 4;
    params.num_channels = 2;
    params.alpha = 1.0;
    params.tau_min = 1.0;
    params.tau_max = 10.0;

    Scenario scenario;
    scenario.params = params;
    for (int k = 0; k < 4; ++k) {
        ClientProfile profile;
        profile.id = k;
        profile.law.family = LatencyFamily::kFixed;
        profile.law.a = 1.0 + 0.5 * k;
        profile.law.mean_speed = 1.0 / profile.law.a;
        profile.data_size = data.shards[static_cast<std::size_t>(k)].size;
        scenario.profiles.push_back(profile);
    }

    GeniePolicy policy(params, GeneralizationSpec::iid_balanced(4, 2, 1),
                       scenario.mean_speeds());
    auto env = make_stream(81, StreamPurpose::kEnvironment);
    auto avail = make_stream(81, StreamPurpose::kAvailability);
    const auto run = run_fl(data, policy, scenario, config, 2000.0, env, avail);
    REQUIRE(run.rounds_completed > 100);

    std::vector<const ClientShard*> pooled;
    for (const auto& shard : data.shards) {
        pooled.push_back(&shard);
    }
    const auto ls = least_squares(pooled, 4);
    const double ls_mse = mean_squared_error(ls, data.test_features, data.test_targets, 4);
    CHECK(run.trace.back().test_loss <= 2.0 * ls_mse + 1e-9);
}
