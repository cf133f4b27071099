#include "fedsched/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fedsched/policies.hpp"

namespace fedsched {

void RegretSeries::append(double gap) {
    instantaneous.push_back(gap);
    cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + gap);
}

double instantaneous_gap(const SelectionSet& genie_set, const SelectionSet& policy_set,
                         std::span<const double> mu, const SelectionHistory& history,
                         const GeneralizationSpec& spec, const SystemParams& params,
                         int* negative_warnings) {
    const double genie_reward = expected_set_reward(genie_set, mu, history, spec, params);
    const double policy_reward = expected_set_reward(policy_set, mu, history, spec, params);
    const double gap = genie_reward - policy_reward;
    if (gap < -1e-12) {
        if (negative_warnings != nullptr) {
            ++*negative_warnings;
        }
        return 0.0;
    }
    return std::max(gap, 0.0);
}

double theorem1_bound(std::int64_t n, const SystemParams& params, double delta_max) {
    if (n < 1) {
        throw std::invalid_argument("bound horizon must be >= 1");
    }
    if (!(delta_max > 0.0)) {
        throw std::invalid_argument("delta_max must be > 0");
    }
    params.validate();
    const double log_term = 4.0 * (params.num_channels + 1) * std::log(static_cast<double>(n)) /
                            (params.delta_min * params.delta_min);
    return delta_max * params.num_clients *
           (log_term + 1.0 + std::numbers::pi * std::numbers::pi / 3.0);
}

double delta_max_estimate(std::span<const double> mu, double alpha) {
    if (mu.empty()) {
        throw std::invalid_argument("delta_max needs at least one mean speed");
    }
    const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
    return 2.0 * alpha + *hi - *lo;
}

double exact_delta_min(std::span<const double> mu, const GeneralizationSpec& spec,
                       std::span<const SelectionHistory> histories, const SystemParams& params,
                       std::int64_t cap) {
    if (histories.empty()) {
        throw std::invalid_argument("delta_min enumeration needs at least one history");
    }
    const int n = params.num_clients;
    const int m = params.num_channels;
    if (binomial_capped(n, m, cap) > cap) {
        throw std::runtime_error("delta_min enumeration exceeds the cap");
    }

    double smallest = std::numeric_limits<double>::infinity();
    std::vector<double> rewards;
    for (const auto& history : histories) {
        rewards.clear();
        std::vector<int> idx(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            idx[static_cast<std::size_t>(i)] = i;
        }
        while (true) {
            SelectionSet set{std::vector<int>(idx.begin(), idx.end())};
            rewards.push_back(expected_set_reward(set, mu, history, spec, params));
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
        std::sort(rewards.begin(), rewards.end());
        for (std::size_t i = 1; i < rewards.size(); ++i) {
            const double gap = rewards[i] - rewards[i - 1];
            if (gap > 1e-12) {
                smallest = std::min(smallest, gap);
            }
        }
    }
    if (!std::isfinite(smallest)) {
        throw std::runtime_error("all selections share one reward; delta_min is undefined");
    }
    return smallest;
}

MetricTable collect_metrics(std::span<const RoundRecord> records,
                            std::span<const RateSnapshot> rate_track, int snapshot_cadence) {
    MetricTable table;
    table.rows.reserve(records.size());
    double cumulative_regret = 0.0;
    for (const auto& record : records) {
        MetricRow row;
        row.round = record.round;
        row.instantaneous_gap = record.genie_expected_reward - record.policy_expected_reward;
        cumulative_regret += row.instantaneous_gap;
        row.cumulative_regret = cumulative_regret;
        row.cumulative_clock = record.cumulative_clock;
        row.realized_reward = record.realized_reward;
        row.iteration_latency = record.iteration_latency;
        row.chosen = record.chosen;
        table.rows.push_back(std::move(row));
    }
    if (snapshot_cadence > 0) {
        for (const auto& snapshot : rate_track) {
            if (snapshot.round % snapshot_cadence == 0) {
                table.snapshots.push_back(snapshot);
            }
        }
    }
    return table;
}

}  // namespace fedsched
