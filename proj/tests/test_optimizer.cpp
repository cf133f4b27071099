#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fedsched/optimizer.hpp"
#include "fedsched/rng.hpp"

using namespace fedsched;

namespace {

ScoreTable table_of(std::vector<std::optional<double>> scores, std::vector<double> g, int m,
                    double alpha) {
    ScoreTable table;
    table.num_clients = static_cast<int>(scores.size());
    table.subset_size = m;
    table.alpha = alpha;
    table.score = std::move(scores);
    table.g = std::move(g);
    for (int k = 0; k < table.num_clients; ++k) {
        table.available.push_back(k);
    }
    return table;
}

ScoreTable random_table(int num_clients, int m, double alpha, std::mt19937_64& rng,
                        double unobserved_prob = 0.0) {
    std::vector<std::optional<double>> scores;
    std::vector<double> g;
    for (int k = 0; k < num_clients; ++k) {
        if (uniform_unit(rng) < unobserved_prob) {
            scores.push_back(std::nullopt);
        } else {
            scores.push_back(uniform_unit(rng));
        }
        g.push_back(uniform_range(rng, -1.0, 1.0));
    }
    return table_of(std::move(scores), std::move(g), m, alpha);
}

// Test-side argmin sets, written independently of the library's helpers.
std::set<int> oracle_score_argmins(const SelectionSet& s, const ScoreTable& t) {
    bool any_finite = false;
    double best = 0.0;
    for (int k : s.members()) {
        const auto& v = t.score[static_cast<std::size_t>(k)];
        if (v.has_value() && (!any_finite || *v < best)) {
            any_finite = true;
            best = *v;
        }
    }
    std::set<int> result;
    for (int k : s.members()) {
        const auto& v = t.score[static_cast<std::size_t>(k)];
        if (any_finite ? (v.has_value() && *v == best) : !v.has_value()) {
            result.insert(k);
        }
    }
    return result;
}

std::set<int> oracle_g_argmins(const SelectionSet& s, const ScoreTable& t) {
    double best = t.g[static_cast<std::size_t>(s.members().front())];
    for (int k : s.members()) {
        best = std::min(best, t.g[static_cast<std::size_t>(k)]);
    }
    std::set<int> result;
    for (int k : s.members()) {
        if (t.g[static_cast<std::size_t>(k)] == best) {
            result.insert(k);
        }
    }
    return result;
}

// Swap-eligibility predicate applied directly to a classic neighbor.
bool oracle_lightweight_edge(const SelectionSet& s, const SelectionSet& u, const ScoreTable& t) {
    std::vector<int> removed;
    std::set_difference(s.members().begin(), s.members().end(), u.members().begin(),
                        u.members().end(), std::back_inserter(removed));
    std::vector<int> added;
    std::set_difference(u.members().begin(), u.members().end(), s.members().begin(),
                        s.members().end(), std::back_inserter(added));
    if (removed.size() != 1 || added.size() != 1) {
        return false;
    }
    const auto in_argmins = [&](const SelectionSet& side, int client) {
        return oracle_score_argmins(side, t).contains(client) ||
               oracle_g_argmins(side, t).contains(client);
    };
    return in_argmins(s, removed[0]) || in_argmins(u, added[0]);
}

std::set<SelectionSet> oracle_lightweight_neighbors(const SelectionSet& s, const ScoreTable& t) {
    std::set<SelectionSet> result;
    for (const auto& u : neighbors_classic(s, t)) {
        if (oracle_lightweight_edge(s, u, t)) {
            result.insert(u);
        }
    }
    return result;
}

std::vector<SelectionSet> all_subsets(int num_clients, int m) {
    std::vector<SelectionSet> sets;
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        idx[static_cast<std::size_t>(i)] = i;
    }
    while (true) {
        sets.push_back(SelectionSet(std::vector<int>(idx.begin(), idx.end())));
        int i = m - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == num_clients - m + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < m; ++j) {
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return sets;
}

}  // namespace

TEST_CASE("energy combines the min score and the scaled g sum") {
    const auto table = table_of({0.9, 0.5, 0.1}, {0.0, 0.0, 0.0}, 2, 1.0);
    const Energy e = energy(SelectionSet({0, 1}), table);
    REQUIRE(e.is_finite());
    CHECK(e.value() == doctest::Approx(0.5));

    SUBCASE("any unobserved member dominates as a sentinel") {
        auto with_hole = table;
        with_hole.score[2] = std::nullopt;
        const Energy sentinel = energy(SelectionSet({1, 2}), with_hole);
        CHECK_FALSE(sentinel.is_finite());
        CHECK(sentinel > energy(SelectionSet({0, 1}), with_hole));
    }
    SUBCASE("alpha zero leaves the pure min score") {
        auto no_alpha = table_of({0.9, 0.5, 0.1}, {0.7, -0.3, 0.2}, 2, 0.0);
        CHECK(energy(SelectionSet({0, 2}), no_alpha).value() == doctest::Approx(0.1));
    }
    SUBCASE("members outside the table are rejected") {
        auto restricted = table;
        restricted.available = {0, 1};
        CHECK_THROWS_AS(energy(SelectionSet({0, 2}), restricted), std::invalid_argument);
    }
}

TEST_CASE("exhaustive solver finds the argmax with lexicographic ties") {
    const auto table = table_of({0.9, 0.5, 0.1}, {0.0, 0.0, 0.0}, 2, 1.0);
    // brute check of the three candidates: {0,1}=0.5, {0,2}=0.1, {1,2}=0.1
    CHECK(energy(SelectionSet({0, 1}), table).value() == doctest::Approx(0.5));
    CHECK(energy(SelectionSet({0, 2}), table).value() == doctest::Approx(0.1));
    CHECK(energy(SelectionSet({1, 2}), table).value() == doctest::Approx(0.1));
    CHECK(solve_exhaustive(table) == SelectionSet({0, 1}));

    SUBCASE("m equals the pool size") {
        const auto full = table_of({0.3, 0.4}, {0.0, 0.0}, 2, 1.0);
        CHECK(solve_exhaustive(full) == SelectionSet({0, 1}));
    }
    SUBCASE("relabeling clients relabels the winner") {
        // permutation 0->2, 1->0, 2->1 of the base table
        const auto permuted = table_of({0.5, 0.1, 0.9}, {0.0, 0.0, 0.0}, 2, 1.0);
        CHECK(solve_exhaustive(permuted) == SelectionSet({0, 2}));
    }
    SUBCASE("full ties resolve to the lexicographically smallest set") {
        const auto flat = table_of({0.5, 0.5, 0.5, 0.5}, {0.0, 0.0, 0.0, 0.0}, 2, 1.0);
        CHECK(solve_exhaustive(flat) == SelectionSet({0, 1}));
    }
    SUBCASE("the cap refuses oversized instances") {
        auto rng = make_stream(41, StreamPurpose::kSolver);
        const auto big = random_table(40, 20, 1.0, rng);
        CHECK_THROWS_AS(solve_exhaustive(big, 1000), std::runtime_error);
    }
}

TEST_CASE("classic neighborhood has exactly m(K-m) members") {
    auto rng = make_stream(42, StreamPurpose::kSolver);
    const auto table = random_table(8, 4, 1.0, rng);
    const SelectionSet s({0, 2, 5, 7});
    const auto neighbors = neighbors_classic(s, table);
    CHECK(neighbors.size() == 16);
    const std::set<SelectionSet> unique(neighbors.begin(), neighbors.end());
    CHECK(unique.size() == 16);
    for (const auto& u : neighbors) {
        std::vector<int> common;
        std::set_intersection(s.members().begin(), s.members().end(), u.members().begin(),
                              u.members().end(), std::back_inserter(common));
        CHECK(common.size() == 3);
    }

    SUBCASE("m = K leaves no neighbors") {
        const auto full = table_of({0.1, 0.2}, {0.0, 0.0}, 2, 1.0);
        CHECK(neighbors_classic(SelectionSet({0, 1}), full).empty());
    }
}

TEST_CASE("classic neighborhood is symmetric") {
    auto rng = make_stream(43, StreamPurpose::kSolver);
    for (int trial = 0; trial < 10; ++trial) {
        const auto table = random_table(6, 3, 1.0, rng);
        const auto sets = all_subsets(6, 3);
        for (const auto& s : sets) {
            for (const auto& u : sets) {
                const auto ns = neighbors_classic(s, table);
                const auto nu = neighbors_classic(u, table);
                const bool s_in_nu = std::find(nu.begin(), nu.end(), s) != nu.end();
                const bool u_in_ns = std::find(ns.begin(), ns.end(), u) != ns.end();
                CHECK(s_in_nu == u_in_ns);
            }
        }
    }
}

TEST_CASE("lightweight neighborhood equals the predicate filter of the classic list") {
    auto rng = make_stream(44, StreamPurpose::kSolver);
    for (int k_clients : {5, 6, 7, 8}) {
        for (int m : {2, 3}) {
            for (int trial = 0; trial < 25; ++trial) {
                // mix in sentinel scores and tied values to stress the argmin sets
                const double hole_prob = trial % 3 == 0 ? 0.25 : 0.0;
                auto table = random_table(k_clients, m, 1.0, rng, hole_prob);
                if (trial % 4 == 0) {
                    for (auto& v : table.g) {
                        v = std::round(v * 2.0) / 2.0;  // force g ties
                    }
                }
                for (const auto& s : all_subsets(k_clients, m)) {
                    const auto fast = neighbors_lightweight(s, table);
                    const std::set<SelectionSet> got(fast.begin(), fast.end());
                    CHECK(got.size() == fast.size());
                    CHECK(got == oracle_lightweight_neighbors(s, table));
                    for (const auto& u : fast) {
                        CHECK(is_lightweight_edge(s, u, table));
                    }
                }
            }
        }
    }
}

TEST_CASE("lightweight neighborhood is a symmetric subset of classic") {
    auto rng = make_stream(45, StreamPurpose::kSolver);
    for (int trial = 0; trial < 20; ++trial) {
        const auto table = random_table(7, 3, 1.0, rng, trial % 5 == 0 ? 0.3 : 0.0);
        const auto sets = all_subsets(7, 3);
        std::map<SelectionSet, std::set<SelectionSet>> adjacency;
        for (const auto& s : sets) {
            const auto light = neighbors_lightweight(s, table);
            const auto classic = neighbors_classic(s, table);
            const std::set<SelectionSet> classic_set(classic.begin(), classic.end());
            for (const auto& u : light) {
                CHECK(classic_set.contains(u));
            }
            adjacency[s] = std::set<SelectionSet>(light.begin(), light.end());
        }
        for (const auto& [s, ns] : adjacency) {
            for (const auto& u : ns) {
                CHECK(adjacency.at(u).contains(s));
            }
        }
    }
}

TEST_CASE("outgoing swaps alone reach the 2(K-m) ceiling on a strict instance") {
    // distinct score- and g-minimizers, all outside clients strictly larger in
    // both coordinates: only the two outgoing swaps qualify
    const int k_clients = 8;
    const int m = 4;
    std::vector<std::optional<double>> scores;
    std::vector<double> g;
    for (int k = 0; k < k_clients; ++k) {
        scores.emplace_back(10.0 + k);
        g.push_back(10.0 + k);
    }
    scores[0] = 1.0;  // unique score argmin of {0,1,2,3}
    g[1] = 1.0;       // unique g argmin of {0,1,2,3}
    const auto table = table_of(std::move(scores), std::move(g), m, 1.0);
    const SelectionSet s({0, 1, 2, 3});
    const auto light = neighbors_lightweight(s, table);
    CHECK(light.size() == 2 * (k_clients - m));
}

TEST_CASE("lightweight graph is connected at desk scale") {
    auto rng = make_stream(46, StreamPurpose::kSolver);
    for (int trial = 0; trial < 10; ++trial) {
        const auto table = random_table(6, 2, 1.0, rng);
        const auto sets = all_subsets(6, 2);
        std::set<SelectionSet> visited{sets.front()};
        std::vector<SelectionSet> frontier{sets.front()};
        while (!frontier.empty()) {
            std::vector<SelectionSet> next;
            for (const auto& node : frontier) {
                for (const auto& u : neighbors_lightweight(node, table)) {
                    if (visited.insert(u).second) {
                        next.push_back(u);
                    }
                }
            }
            frontier = std::move(next);
        }
        CHECK(visited.size() == sets.size());
    }
}

TEST_CASE("annealer with a single state returns it immediately") {
    const auto table = table_of({0.3, 0.4}, {0.1, 0.2}, 2, 1.0);
    AnnealerConfig config;
    config.steps = 5;
    auto rng = make_stream(47, StreamPurpose::kSolver);
    const auto result = anneal(table, config, rng);
    CHECK(result.best == SelectionSet({0, 1}));
    CHECK(result.trace.size() == 5);
    CHECK(result.trace.front().step == 1);
}

TEST_CASE("best-so-far trace never decreases") {
    auto rng = make_stream(48, StreamPurpose::kSolver);
    for (const auto neighborhood : {Neighborhood::kClassic, Neighborhood::kLightweight}) {
        const auto table = random_table(12, 4, 1.0, rng, 0.1);
        AnnealerConfig config;
        config.steps = 2000;
        config.neighborhood = neighborhood;
        const auto result = anneal(table, config, rng);
        for (std::size_t i = 1; i < result.trace.size(); ++i) {
            CHECK(result.trace[i].best >= result.trace[i - 1].best);
            CHECK(result.trace[i].temperature < result.trace[i - 1].temperature);
        }
        CHECK(result.best_energy == result.trace.back().best);
        // sanity ceiling: never above the exact optimum
        const auto exact = solve_exhaustive(table);
        CHECK(energy(exact, table) >= result.best_energy);
    }
}

TEST_CASE("lightweight annealer usually finds the exact optimum") {
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto table_rng = make_stream(49, StreamPurpose::kSolver, static_cast<std::uint64_t>(trial));
        const auto table = random_table(10, 3, 1.0, table_rng);
        AnnealerConfig config;
        config.steps = 5000;
        config.neighborhood = Neighborhood::kLightweight;
        auto chain_rng =
            make_stream(50, StreamPurpose::kSolver, static_cast<std::uint64_t>(trial));
        const auto result = anneal(table, config, chain_rng);
        const auto exact = solve_exhaustive(table);
        if (Energy::compare(result.best_energy, energy(exact, table)) == 0) {
            ++hits;
        }
    }
    CHECK(hits >= 95);
}

TEST_CASE("annealer is deterministic given the stream") {
    auto table_rng = make_stream(51, StreamPurpose::kSolver);
    const auto table = random_table(9, 3, 1.0, table_rng);
    AnnealerConfig config;
    config.steps = 500;
    auto rng_a = make_stream(52, StreamPurpose::kSolver);
    auto rng_b = make_stream(52, StreamPurpose::kSolver);
    const auto a = anneal(table, config, rng_a);
    const auto b = anneal(table, config, rng_b);
    CHECK(a.best == b.best);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(Energy::compare(a.trace[i].current, b.trace[i].current) == 0);
    }
}

TEST_CASE("path construction stays inside the lightweight graph") {
    auto rng = make_stream(53, StreamPurpose::kSolver);

    SUBCASE("trivial path") {
        const auto table = random_table(6, 2, 1.0, rng);
        const SelectionSet s({1, 4});
        const auto path = construct_path_to_optimum(s, s, table);
        CHECK(path.states.size() == 1);
        CHECK_FALSE(path.used_fallback);
    }

    SUBCASE("random instances validate edge by edge") {
        int fallbacks = 0;
        for (int trial = 0; trial < 60; ++trial) {
            const auto table = random_table(6, 2, 1.0, rng, trial % 6 == 0 ? 0.3 : 0.0);
            const auto sets = all_subsets(6, 2);
            const auto start = sets[uniform_index(rng, sets.size())];
            const auto optimum = solve_exhaustive(table);
            const auto path = construct_path_to_optimum(start, optimum, table);
            REQUIRE(!path.states.empty());
            CHECK(path.states.front() == start);
            CHECK(path.states.back() == optimum);
            for (std::size_t i = 1; i < path.states.size(); ++i) {
                CHECK(oracle_lightweight_edge(path.states[i - 1], path.states[i], table));
            }
            if (path.used_fallback) {
                ++fallbacks;
            } else {
                CHECK(path.states.size() <= 2 * 2 + 1);
            }
        }
        // the direct construction should carry most instances
        CHECK(fallbacks < 30);
    }

    SUBCASE("all pairs are mutually reachable at K=8") {
        const auto table = random_table(8, 3, 1.0, rng);
        const auto sets = all_subsets(8, 3);
        for (int trial = 0; trial < 40; ++trial) {
            const auto start = sets[uniform_index(rng, sets.size())];
            const auto target = sets[uniform_index(rng, sets.size())];
            const auto path = construct_path_to_optimum(start, target, table);
            CHECK(path.states.back() == target);
            for (std::size_t i = 1; i < path.states.size(); ++i) {
                CHECK(is_lightweight_edge(path.states[i - 1], path.states[i], table));
            }
        }
    }
}

TEST_CASE("single-draw proposals are uniform over the lightweight list") {
    auto rng = make_stream(55, StreamPurpose::kSolver);
    for (int trial = 0; trial < 8; ++trial) {
        const auto table = random_table(7, 3, 1.0, rng, trial % 3 == 0 ? 0.25 : 0.0);
        const auto sets = all_subsets(7, 3);
        const auto& s = sets[uniform_index(rng, sets.size())];
        const auto list = neighbors_lightweight(s, table);
        REQUIRE(!list.empty());

        std::map<SelectionSet, int> hits;
        const int draws = 20'000;
        for (int i = 0; i < draws; ++i) {
            const auto u = lightweight_neighbor_draw(s, table, rng);
            REQUIRE(u.has_value());
            ++hits[*u];
        }
        // support matches the materialized list, frequencies near uniform
        CHECK(hits.size() == list.size());
        const double expected = static_cast<double>(draws) / list.size();
        for (const auto& [u, count] : hits) {
            CHECK(std::find(list.begin(), list.end(), u) != list.end());
            CHECK(std::abs(count - expected) < 6.0 * std::sqrt(expected) + 1.0);
        }
    }
}

TEST_CASE("uniform subsets cover the pool uniformly") {
    auto rng = make_stream(54, StreamPurpose::kSolver);
    const std::vector<int> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> hits(10, 0);
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i) {
        const SelectionSet draw = uniform_subset(pool, 3, rng);
        for (int k : draw.members()) {
            ++hits[static_cast<std::size_t>(k)];
        }
    }
    for (int k = 0; k < 10; ++k) {
        CHECK(std::abs(static_cast<double>(hits[static_cast<std::size_t>(k)]) / draws - 0.3) <
              0.01);
    }
}
