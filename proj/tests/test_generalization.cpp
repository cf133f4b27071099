#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fedsched/core.hpp"
#include "fedsched/generalization.hpp"
#include "fedsched/rng.hpp"

using namespace fedsched;

namespace {

// History with given per-client counts after `rounds` completed rounds.
SelectionHistory history_with(int num_clients, int rounds, const std::vector<int>& counts) {
    SelectionHistory h(num_clients);
    for (int t = 0; t < rounds; ++t) {
        h.advance_round();
    }
    for (int k = 0; k < static_cast<int>(counts.size()); ++k) {
        for (int i = 0; i < counts[static_cast<std::size_t>(k)]; ++i) {
            h.record(k, 0.5);
        }
    }
    return h;
}

}  // namespace

TEST_CASE("g vanishes exactly at the target rate") {
    const auto spec = GeneralizationSpec::iid_balanced(20, 5, 1);
    const auto h = history_with(20, 4, {1});  // rate 0.25 == m/K
    CHECK(g_value(spec, h, 0) == 0.0);
}

TEST_CASE("untouched client with beta 2 scores the squared target") {
    const auto spec = GeneralizationSpec::iid_balanced(20, 5, 2);
    const auto h = history_with(20, 4, {});
    CHECK(g_value(spec, h, 0) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("over-selected client is penalized") {
    const auto spec = GeneralizationSpec::iid_balanced(20, 5, 1);
    const auto h = history_with(20, 4, {2});  // rate 0.5
    CHECK(g_value(spec, h, 0) == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("before the first round the rate counts as zero") {
    const auto spec = GeneralizationSpec::iid_balanced(4, 2, 3);
    const SelectionHistory h(4);
    CHECK(h.rounds() == 0);
    CHECK(g_value(spec, h, 0) == doctest::Approx(std::pow(0.5, 3)).epsilon(1e-12));
    CHECK(g_value(spec, h, 0) > 0.0);
}

TEST_CASE("g_sum adds member scores") {
    const auto spec = GeneralizationSpec::iid_balanced(20, 5, 1);

    SUBCASE("members at the target cancel to zero") {
        const auto h = history_with(20, 4, {1, 1, 1, 1, 1});
        CHECK(g_sum(spec, h, SelectionSet({0, 1, 2, 3, 4})) == doctest::Approx(0.0));
    }
    SUBCASE("symmetric pair cancels") {
        const auto h = history_with(20, 20, {3, 7});  // rates 0.15 and 0.35
        CHECK(g_sum(spec, h, SelectionSet({0, 1})) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("two positive scores add up") {
        // equal significances make every non-iid target 2/4 = 0.5
        std::vector<ClientProfile> profiles(4);
        for (int k = 0; k < 4; ++k) {
            profiles[static_cast<std::size_t>(k)].id = k;
            profiles[static_cast<std::size_t>(k)].data_size = 10;
            profiles[static_cast<std::size_t>(k)].data_quality = 1.0;
        }
        const auto weighted = GeneralizationSpec::non_iid_weighted(profiles, 2, 2);
        const auto h = history_with(4, 4, {1, 0});  // rates 0.25 and 0
        CHECK(g_value(weighted, h, 0) == doctest::Approx(0.0625));
        CHECK(g_value(weighted, h, 1) == doctest::Approx(0.25));
        CHECK(g_sum(weighted, h, SelectionSet({0, 1})) == doctest::Approx(0.3125));
    }
}

TEST_CASE("non-iid targets sum to the channel count") {
    auto rng = make_stream(21, StreamPurpose::kScenario);
    for (int trial = 0; trial < 20; ++trial) {
        const int num_clients = 3 + static_cast<int>(uniform_index(rng, 17));
        std::vector<ClientProfile> profiles(static_cast<std::size_t>(num_clients));
        for (int k = 0; k < num_clients; ++k) {
            profiles[static_cast<std::size_t>(k)].id = k;
            profiles[static_cast<std::size_t>(k)].data_size =
                1 + static_cast<std::int64_t>(uniform_index(rng, 5000));
            profiles[static_cast<std::size_t>(k)].data_quality = uniform_range(rng, 0.05, 1.0);
        }
        const int m = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(num_clients)));
        const auto spec = GeneralizationSpec::non_iid_weighted(profiles, m, 2);
        double total = 0.0;
        for (double r : spec.target_rate) {
            total += r;
        }
        CHECK(total == doctest::Approx(static_cast<double>(m)).epsilon(1e-12));
    }
}

TEST_CASE("output clamps to [-1, 1] when a target dominates") {
    GeneralizationSpec spec;
    spec.mode = GeneralizationSpec::Mode::kNonIidWeighted;
    spec.beta = 1;
    spec.target_rate = {1.7};
    const SelectionHistory h(1);
    CHECK(g_value(spec, h, 0) == 1.0);
}

TEST_CASE("odd symmetry and sign over random rate pairs") {
    auto rng = make_stream(22, StreamPurpose::kScenario);
    int checked = 0;
    for (int trial = 0; trial < 10'000; ++trial) {
        const int rounds = 1 + static_cast<int>(uniform_index(rng, 1000));
        const int below = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(rounds) + 1));
        const int above = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(rounds) + 1));
        const int beta = 1 + static_cast<int>(uniform_index(rng, 4));

        GeneralizationSpec spec;
        spec.mode = GeneralizationSpec::Mode::kIidBalanced;
        spec.beta = beta;
        // midpoint target makes the two rates symmetric around it
        spec.target_rate = {(below + above) / (2.0 * rounds), (below + above) / (2.0 * rounds)};

        const auto h = history_with(2, rounds, {below, above});
        const double g_below = g_value(spec, h, 0);
        const double g_above = g_value(spec, h, 1);
        CHECK(g_below == doctest::Approx(-g_above).epsilon(1e-12));
        if (below < above) {
            CHECK(g_below > 0.0);
            CHECK(g_above < 0.0);
        } else if (below == above) {
            CHECK(g_below == 0.0);
        }
        ++checked;
    }
    CHECK(checked == 10'000);
}

TEST_CASE("g is monotone non-increasing in the selection count") {
    auto rng = make_stream(23, StreamPurpose::kScenario);
    const auto spec = GeneralizationSpec::iid_balanced(10, 3, 2);
    for (int trial = 0; trial < 200; ++trial) {
        const int rounds = 1 + static_cast<int>(uniform_index(rng, 50));
        double previous = g_value(spec, history_with(10, rounds, {0}), 0);
        for (int c = 1; c <= rounds; ++c) {
            const double current = g_value(spec, history_with(10, rounds, {c}), 0);
            CHECK(current <= previous + 1e-15);
            previous = current;
        }
    }
}

TEST_CASE("beta below one is rejected") {
    GeneralizationSpec spec;
    spec.beta = 0;
    spec.target_rate = {0.5};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    CHECK_THROWS_AS(GeneralizationSpec::iid_balanced(4, 2, 0), std::invalid_argument);
}
