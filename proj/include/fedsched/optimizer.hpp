#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fedsched/core.hpp"

namespace fedsched {

/// Per-client inputs of the subset argmax: a scalar score (UCB value or true
/// mean speed; nullopt marks the unobserved-infinite sentinel), a
/// generalization value, and the admissible ground set.
struct ScoreTable {
    int num_clients = 0;
    int subset_size = 0;  // m
    double alpha = 0.0;
    std::vector<std::optional<double>> score;
    std::vector<double> g;
    std::vector<int> available;  // sorted ids

    void validate() const;
};

inline constexpr std::int64_t kDefaultEnumerationCap = 2'000'000;

/// Objective value of a candidate set: min member score plus
/// (alpha/m) * sum of member g. A set touching any unobserved client gets the
/// sentinel energy, ordered by its g term.
Energy energy(const SelectionSet& set, const ScoreTable& table);

/// Exact argmax by enumerating every m-subset of the available clients in
/// lexicographic order; ties resolve to the lexicographically smallest set.
/// Refuses instances whose candidate count exceeds `cap`.
SelectionSet solve_exhaustive(const ScoreTable& table,
                              std::int64_t cap = kDefaultEnumerationCap);

/// All sets differing from `set` in exactly one member: m * (|available| - m)
/// of them.
std::vector<SelectionSet> neighbors_classic(const SelectionSet& set, const ScoreTable& table);

/// The pruned neighborhood: single-member swaps where the outgoing client is a
/// score- or g-minimizer of `set`, or the incoming client is a score- or
/// g-minimizer of the resulting set. Sorted and deduplicated; always a subset
/// of neighbors_classic.
std::vector<SelectionSet> neighbors_lightweight(const SelectionSet& set, const ScoreTable& table);

/// Swap predicate behind neighbors_lightweight, usable for edge validation.
/// Requires |set ∩ other| = m - 1 to hold, otherwise returns false.
bool is_lightweight_edge(const SelectionSet& set, const SelectionSet& other,
                         const ScoreTable& table);

/// One uniform draw from neighbors_lightweight(set) in O(K), without
/// materializing the list. Empty only when the set exhausts the pool.
std::optional<SelectionSet> lightweight_neighbor_draw(const SelectionSet& set,
                                                      const ScoreTable& table,
                                                      std::mt19937_64& rng);

enum class Neighborhood { kClassic, kLightweight };

struct AnnealerConfig {
    std::int64_t steps = 1000;
    // Temperature numerator d of the schedule d / ln(i + 1); <= 0 picks the
    // analytic default 2 * alpha + 1.
    double temperature_scale = 0.0;
    Neighborhood neighborhood = Neighborhood::kLightweight;
    // Finite surrogate for the drop from a sentinel state to a finite one,
    // in units of d.
    double infinite_gap_scale = 1000.0;
};

struct AnnealStep {
    std::int64_t step = 0;
    Energy current;
    Energy best;
    double temperature = 0.0;
};

struct AnnealResult {
    SelectionSet best;
    Energy best_energy;
    std::vector<AnnealStep> trace;
};

/// Metropolis chain over the configured neighborhood with the logarithmic
/// schedule. Step 1 evaluates the start state; each later step proposes one
/// uniformly drawn neighbor. Reports the best state visited.
AnnealResult anneal_from(const ScoreTable& table, const AnnealerConfig& config,
                         const SelectionSet& initial, std::mt19937_64& rng);

/// anneal_from with a uniformly random initial m-subset of the available set.
AnnealResult anneal(const ScoreTable& table, const AnnealerConfig& config, std::mt19937_64& rng);

struct PathResult {
    std::vector<SelectionSet> states;  // front() == start, back() == optimum
    bool used_fallback = false;
};

/// A start-to-optimum walk whose every edge is a lightweight-neighborhood
/// swap: repeatedly remove a current score- or g-minimizer lying outside the
/// optimum and insert an optimum member. Falls back to breadth-first search
/// over the lightweight graph when that construction stalls, and flags it.
PathResult construct_path_to_optimum(const SelectionSet& start, const SelectionSet& optimum,
                                     const ScoreTable& table);

/// Uniformly random m-subset of `pool`.
SelectionSet uniform_subset(std::span<const int> pool, int subset_size, std::mt19937_64& rng);

}  // namespace fedsched
