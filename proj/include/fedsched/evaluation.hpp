#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedsched/core.hpp"
#include "fedsched/environment.hpp"
#include "fedsched/generalization.hpp"

namespace fedsched {

/// Pseudo-regret time series: per-round expected-reward gaps against the
/// oracle selection and their running sum.
struct RegretSeries {
    std::vector<double> instantaneous;
    std::vector<double> cumulative;
    int negative_gap_warnings = 0;

    void append(double gap);
    double final_regret() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// Expected-reward gap between the oracle's set and the policy's set under
/// the true mean speeds and the shared history. Values inside -1e-12..0 are
/// clamped to zero; anything lower increments *negative_warnings and is
/// floored as well.
double instantaneous_gap(const SelectionSet& genie_set, const SelectionSet& policy_set,
                         std::span<const double> mu, const SelectionHistory& history,
                         const GeneralizationSpec& spec, const SystemParams& params,
                         int* negative_warnings = nullptr);

/// Closed-form regret ceiling:
/// delta_max * K * (4 (m+1) ln n / delta_min^2 + 1 + pi^2 / 3).
double theorem1_bound(std::int64_t n, const SystemParams& params, double delta_max);

/// Analytic cap on any expected-reward gap: 2 alpha + max mu - min mu.
double delta_max_estimate(std::span<const double> mu, double alpha);

/// Smallest positive expected-reward gap between any two selections, scanned
/// over the given histories. Exact on instances whose reward values form a
/// finite grid.
double exact_delta_min(std::span<const double> mu, const GeneralizationSpec& spec,
                       std::span<const SelectionHistory> histories, const SystemParams& params,
                       std::int64_t cap = 2'000'000);

struct MetricRow {
    int round = 0;
    double instantaneous_gap = 0.0;
    double cumulative_regret = 0.0;
    double cumulative_clock = 0.0;
    double realized_reward = 0.0;
    double iteration_latency = 0.0;
    SelectionSet chosen;
};

struct RateSnapshot {
    int round = 0;
    std::vector<double> rate;  // c_k / t per client
};

struct MetricTable {
    std::vector<MetricRow> rows;
    std::vector<RateSnapshot> snapshots;
};

/// Flatten round records into the metric table; snapshots are taken every
/// `snapshot_cadence` rounds (0 disables them) from the recorded rate track.
MetricTable collect_metrics(std::span<const RoundRecord> records,
                            std::span<const RateSnapshot> rate_track, int snapshot_cadence);

}  // namespace fedsched
