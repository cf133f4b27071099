#include "fedsched/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "fedsched/rng.hpp"

namespace fedsched {

namespace {

// Per-client score order with nullopt as +infinity; sentinels tie each other.
bool score_less(const std::optional<double>& a, const std::optional<double>& b) {
    if (!a.has_value()) {
        return false;
    }
    if (!b.has_value()) {
        return true;
    }
    return *a < *b;
}

bool score_leq(const std::optional<double>& a, const std::optional<double>& b) {
    return !score_less(b, a);
}

Energy evaluate(std::span<const int> members, const ScoreTable& table) {
    double g_total = 0.0;
    double min_score = std::numeric_limits<double>::infinity();
    bool any_unobserved = false;
    for (int k : members) {
        g_total += table.g[static_cast<std::size_t>(k)];
        const auto& s = table.score[static_cast<std::size_t>(k)];
        if (!s.has_value()) {
            any_unobserved = true;
        } else if (*s < min_score) {
            min_score = *s;
        }
    }
    const double g_term = table.alpha / table.subset_size * g_total;
    if (any_unobserved) {
        return Energy::unobserved(g_term);
    }
    return Energy::finite(min_score + g_term, g_term);
}

std::optional<double> min_member_score(std::span<const int> members, const ScoreTable& table) {
    std::optional<double> best = table.score[static_cast<std::size_t>(members[0])];
    for (int k : members.subspan(1)) {
        const auto& s = table.score[static_cast<std::size_t>(k)];
        if (score_less(s, best)) {
            best = s;
        }
    }
    return best;
}

double min_member_g(std::span<const int> members, const ScoreTable& table) {
    double best = table.g[static_cast<std::size_t>(members[0])];
    for (int k : members.subspan(1)) {
        best = std::min(best, table.g[static_cast<std::size_t>(k)]);
    }
    return best;
}

std::vector<int> score_argmins(std::span<const int> members, const ScoreTable& table) {
    const auto best = min_member_score(members, table);
    std::vector<int> mins;
    for (int k : members) {
        if (score_leq(table.score[static_cast<std::size_t>(k)], best)) {
            mins.push_back(k);
        }
    }
    return mins;
}

std::vector<int> g_argmins(std::span<const int> members, const ScoreTable& table) {
    const double best = min_member_g(members, table);
    std::vector<int> mins;
    for (int k : members) {
        if (table.g[static_cast<std::size_t>(k)] <= best) {
            mins.push_back(k);
        }
    }
    return mins;
}

std::vector<int> outside_members(const SelectionSet& set, const ScoreTable& table) {
    std::vector<int> outside;
    outside.reserve(table.available.size() - set.members().size());
    std::set_difference(table.available.begin(), table.available.end(), set.members().begin(),
                        set.members().end(), std::back_inserter(outside));
    return outside;
}

SelectionSet swap_member(const SelectionSet& set, int out, int in) {
    std::vector<int> members = set.members();
    *std::find(members.begin(), members.end(), out) = in;
    return SelectionSet(std::move(members));
}

void require_member_of_table(const SelectionSet& set, const ScoreTable& table) {
    if (set.size() != table.subset_size) {
        throw std::invalid_argument("selection size differs from the table's subset size");
    }
    for (int k : set.members()) {
        if (!std::binary_search(table.available.begin(), table.available.end(), k)) {
            throw std::invalid_argument("selection member is not available");
        }
    }
}

double resolved_temperature_scale(const AnnealerConfig& config, const ScoreTable& table) {
    if (config.temperature_scale > 0.0) {
        return config.temperature_scale;
    }
    return 2.0 * table.alpha + 1.0;
}

// Finite stand-in for the energy drop of a proposed downhill move.
double downhill_gap(const Energy& to, const Energy& from, double scale, double surrogate) {
    if (!from.is_finite() && to.is_finite()) {
        return -surrogate * scale;
    }
    if (!from.is_finite() && !to.is_finite()) {
        return to.tiebreak_g() - from.tiebreak_g();
    }
    return to.value() - from.value();
}

}  // namespace

void ScoreTable::validate() const {
    if (num_clients < 1) {
        throw std::invalid_argument("score table needs at least one client");
    }
    if (score.size() != static_cast<std::size_t>(num_clients) ||
        g.size() != static_cast<std::size_t>(num_clients)) {
        throw std::invalid_argument("score and g must have one entry per client");
    }
    if (available.empty() || !std::is_sorted(available.begin(), available.end())) {
        throw std::invalid_argument("available ids must be sorted and non-empty");
    }
    if (std::adjacent_find(available.begin(), available.end()) != available.end()) {
        throw std::invalid_argument("available ids must be distinct");
    }
    if (available.front() < 0 || available.back() >= num_clients) {
        throw std::invalid_argument("available ids out of range");
    }
    if (subset_size < 1 || subset_size > static_cast<int>(available.size())) {
        throw std::invalid_argument("subset size must satisfy 1 <= m <= |available|");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be finite and >= 0");
    }
    for (double value : g) {
        if (!std::isfinite(value)) {
            throw std::invalid_argument("g values must be finite");
        }
    }
    for (const auto& s : score) {
        if (s.has_value() && !std::isfinite(*s)) {
            throw std::invalid_argument("finite scores must be finite numbers");
        }
    }
}

Energy energy(const SelectionSet& set, const ScoreTable& table) {
    require_member_of_table(set, table);
    return evaluate(set.members(), table);
}

SelectionSet solve_exhaustive(const ScoreTable& table, std::int64_t cap) {
    table.validate();
    const int n = static_cast<int>(table.available.size());
    const int m = table.subset_size;
    if (binomial_capped(n, m, cap) > cap) {
        throw std::runtime_error(
            "candidate count exceeds the enumeration cap; use one of the annealing solvers");
    }

    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        idx[static_cast<std::size_t>(i)] = i;
    }
    std::vector<int> members(static_cast<std::size_t>(m));
    std::vector<int> best_members;
    Energy best;
    bool first = true;
    while (true) {
        for (int i = 0; i < m; ++i) {
            members[static_cast<std::size_t>(i)] =
                table.available[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        }
        const Energy e = evaluate(members, table);
        if (first || e > best) {
            best = e;
            best_members = members;
            first = false;
        }
        int i = m - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - m + i) {
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
    return SelectionSet(std::move(best_members));
}

std::vector<SelectionSet> neighbors_classic(const SelectionSet& set, const ScoreTable& table) {
    require_member_of_table(set, table);
    const std::vector<int> outside = outside_members(set, table);
    std::vector<SelectionSet> result;
    result.reserve(set.members().size() * outside.size());
    for (int out : set.members()) {
        for (int in : outside) {
            result.push_back(swap_member(set, out, in));
        }
    }
    return result;
}

std::vector<SelectionSet> neighbors_lightweight(const SelectionSet& set, const ScoreTable& table) {
    require_member_of_table(set, table);
    const std::vector<int> outside = outside_members(set, table);

    std::vector<int> eligible_out = score_argmins(set.members(), table);
    {
        const std::vector<int> g_mins = g_argmins(set.members(), table);
        eligible_out.insert(eligible_out.end(), g_mins.begin(), g_mins.end());
        std::sort(eligible_out.begin(), eligible_out.end());
        eligible_out.erase(std::unique(eligible_out.begin(), eligible_out.end()),
                           eligible_out.end());
    }
    const std::optional<double> min_score = min_member_score(set.members(), table);
    const double min_g = min_member_g(set.members(), table);

    std::vector<SelectionSet> result;
    for (int out : eligible_out) {
        for (int in : outside) {
            result.push_back(swap_member(set, out, in));
        }
    }
    // An incoming client at or below the set's minimum score (or g) is a
    // minimizer of the new set no matter which member leaves.
    for (int in : outside) {
        const bool enters_as_min =
            score_leq(table.score[static_cast<std::size_t>(in)], min_score) ||
            table.g[static_cast<std::size_t>(in)] <= min_g;
        if (!enters_as_min) {
            continue;
        }
        for (int out : set.members()) {
            result.push_back(swap_member(set, out, in));
        }
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

std::optional<SelectionSet> lightweight_neighbor_draw(const SelectionSet& set,
                                                      const ScoreTable& table,
                                                      std::mt19937_64& rng) {
    const std::vector<int> outside = outside_members(set, table);
    if (outside.empty()) {
        return std::nullopt;
    }
    std::vector<int> eligible_out = score_argmins(set.members(), table);
    {
        const std::vector<int> g_mins = g_argmins(set.members(), table);
        eligible_out.insert(eligible_out.end(), g_mins.begin(), g_mins.end());
        std::sort(eligible_out.begin(), eligible_out.end());
        eligible_out.erase(std::unique(eligible_out.begin(), eligible_out.end()),
                           eligible_out.end());
    }
    const std::optional<double> min_score = min_member_score(set.members(), table);
    const double min_g = min_member_g(set.members(), table);
    std::vector<int> qualifying_in;
    for (int in : outside) {
        if (score_leq(table.score[static_cast<std::size_t>(in)], min_score) ||
            table.g[static_cast<std::size_t>(in)] <= min_g) {
            qualifying_in.push_back(in);
        }
    }
    std::vector<int> other_out;
    std::set_difference(set.members().begin(), set.members().end(), eligible_out.begin(),
                        eligible_out.end(), std::back_inserter(other_out));

    // Disjoint pair partition of the neighbor set: a minimizer leaves (any
    // incoming client), or a non-minimizer leaves for a client entering at or
    // below the set's minimum.
    const std::uint64_t minimizer_pairs =
        static_cast<std::uint64_t>(eligible_out.size()) * outside.size();
    const std::uint64_t entering_pairs =
        static_cast<std::uint64_t>(qualifying_in.size()) * other_out.size();
    const std::uint64_t pick = uniform_index(rng, minimizer_pairs + entering_pairs);
    int out = 0;
    int in = 0;
    if (pick < minimizer_pairs) {
        out = eligible_out[static_cast<std::size_t>(pick / outside.size())];
        in = outside[static_cast<std::size_t>(pick % outside.size())];
    } else {
        const std::uint64_t rest = pick - minimizer_pairs;
        in = qualifying_in[static_cast<std::size_t>(rest / other_out.size())];
        out = other_out[static_cast<std::size_t>(rest % other_out.size())];
    }
    return swap_member(set, out, in);
}

bool is_lightweight_edge(const SelectionSet& set, const SelectionSet& other,
                         const ScoreTable& table) {
    if (set.size() != other.size()) {
        return false;
    }
    std::vector<int> removed;
    std::vector<int> added;
    std::set_difference(set.members().begin(), set.members().end(), other.members().begin(),
                        other.members().end(), std::back_inserter(removed));
    std::set_difference(other.members().begin(), other.members().end(), set.members().begin(),
                        set.members().end(), std::back_inserter(added));
    if (removed.size() != 1 || added.size() != 1) {
        return false;
    }
    const auto contains = [](const std::vector<int>& xs, int x) {
        return std::find(xs.begin(), xs.end(), x) != xs.end();
    };
    if (contains(score_argmins(set.members(), table), removed[0]) ||
        contains(g_argmins(set.members(), table), removed[0])) {
        return true;
    }
    return contains(score_argmins(other.members(), table), added[0]) ||
           contains(g_argmins(other.members(), table), added[0]);
}

SelectionSet uniform_subset(std::span<const int> pool, int subset_size, std::mt19937_64& rng) {
    if (subset_size < 0 || subset_size > static_cast<int>(pool.size())) {
        throw std::invalid_argument("subset size exceeds the pool");
    }
    std::vector<int> scratch(pool.begin(), pool.end());
    for (int i = 0; i < subset_size; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       uniform_index(rng, scratch.size() - static_cast<std::size_t>(i));
        std::swap(scratch[static_cast<std::size_t>(i)], scratch[j]);
    }
    scratch.resize(static_cast<std::size_t>(subset_size));
    return SelectionSet(std::move(scratch));
}

AnnealResult anneal_from(const ScoreTable& table, const AnnealerConfig& config,
                         const SelectionSet& initial, std::mt19937_64& rng) {
    table.validate();
    require_member_of_table(initial, table);
    if (config.steps < 1) {
        throw std::invalid_argument("annealer needs at least one step");
    }
    const double d = resolved_temperature_scale(config, table);
    if (!(d > 0.0)) {
        throw std::invalid_argument("temperature scale must be positive");
    }

    SelectionSet state = initial;
    Energy state_energy = evaluate(state.members(), table);
    SelectionSet best = state;
    Energy best_energy = state_energy;

    AnnealResult result;
    result.trace.reserve(static_cast<std::size_t>(config.steps));
    result.trace.push_back({1, state_energy, best_energy, d / std::log(2.0)});

    const int n_outside = static_cast<int>(table.available.size()) - table.subset_size;
    for (std::int64_t i = 2; i <= config.steps; ++i) {
        const double temperature = d / std::log(static_cast<double>(i) + 1.0);
        if (n_outside > 0) {
            SelectionSet proposal;
            if (config.neighborhood == Neighborhood::kClassic) {
                // Uniform over the m * (K - m) single-swap neighbors, drawn as
                // an (outgoing, incoming) pair without building the list.
                const std::vector<int> outside = outside_members(state, table);
                const int out = state.members()[static_cast<std::size_t>(
                    uniform_index(rng, state.members().size()))];
                const int in = outside[static_cast<std::size_t>(
                    uniform_index(rng, outside.size()))];
                proposal = swap_member(state, out, in);
            } else {
                proposal = *lightweight_neighbor_draw(state, table, rng);
            }
            const Energy proposal_energy = evaluate(proposal.members(), table);
            bool accept = proposal_energy >= state_energy;
            if (!accept) {
                const double gap = downhill_gap(proposal_energy, state_energy, d,
                                                config.infinite_gap_scale);
                accept = uniform_unit(rng) < std::exp(gap / temperature);
            }
            if (accept) {
                state = std::move(proposal);
                state_energy = proposal_energy;
                if (state_energy > best_energy) {
                    best = state;
                    best_energy = state_energy;
                }
            }
        }
        result.trace.push_back({i, state_energy, best_energy, temperature});
    }
    result.best = std::move(best);
    result.best_energy = best_energy;
    return result;
}

AnnealResult anneal(const ScoreTable& table, const AnnealerConfig& config, std::mt19937_64& rng) {
    table.validate();
    return anneal_from(table, config, uniform_subset(table.available, table.subset_size, rng),
                       rng);
}

PathResult construct_path_to_optimum(const SelectionSet& start, const SelectionSet& optimum,
                                     const ScoreTable& table) {
    table.validate();
    require_member_of_table(start, table);
    require_member_of_table(optimum, table);

    PathResult result;
    result.states.push_back(start);
    SelectionSet state = start;

    while (state != optimum) {
        std::vector<int> missing;
        std::set_difference(optimum.members().begin(), optimum.members().end(),
                            state.members().begin(), state.members().end(),
                            std::back_inserter(missing));

        // Remove a current minimizer that does not belong to the optimum;
        // score minimizers first, g minimizers second.
        int out = -1;
        bool score_phase = true;
        for (int k : score_argmins(state.members(), table)) {
            if (!optimum.contains(k)) {
                out = k;
                break;
            }
        }
        if (out < 0) {
            score_phase = false;
            for (int k : g_argmins(state.members(), table)) {
                if (!optimum.contains(k)) {
                    out = k;
                    break;
                }
            }
        }
        if (out < 0) {
            break;  // stalled; finish with breadth-first search
        }

        int in = missing.front();
        for (int k : missing) {
            if (score_phase) {
                if (score_less(table.score[static_cast<std::size_t>(in)],
                               table.score[static_cast<std::size_t>(k)])) {
                    in = k;
                }
            } else if (table.g[static_cast<std::size_t>(k)] >
                       table.g[static_cast<std::size_t>(in)]) {
                in = k;
            }
        }
        state = swap_member(state, out, in);
        result.states.push_back(state);
    }

    if (state == optimum) {
        return result;
    }

    // Breadth-first search over the lightweight graph for the remainder.
    result.used_fallback = true;
    if (binomial_capped(static_cast<int>(table.available.size()), table.subset_size,
                        kDefaultEnumerationCap) > kDefaultEnumerationCap) {
        throw std::runtime_error("path fallback search is infeasible at this instance size");
    }
    std::map<SelectionSet, SelectionSet> parent;
    std::vector<SelectionSet> frontier{state};
    parent.emplace(state, state);
    bool found = false;
    while (!frontier.empty() && !found) {
        std::vector<SelectionSet> next;
        for (const auto& node : frontier) {
            for (const auto& neighbor : neighbors_lightweight(node, table)) {
                if (parent.contains(neighbor)) {
                    continue;
                }
                parent.emplace(neighbor, node);
                if (neighbor == optimum) {
                    found = true;
                    break;
                }
                next.push_back(neighbor);
            }
            if (found) {
                break;
            }
        }
        frontier = std::move(next);
    }
    if (!found) {
        throw std::runtime_error("optimum unreachable in the lightweight graph");
    }
    std::vector<SelectionSet> tail;
    for (SelectionSet node = optimum; node != state; node = parent.at(node)) {
        tail.push_back(node);
    }
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
        result.states.push_back(*it);
    }
    return result;
}

}  // namespace fedsched
