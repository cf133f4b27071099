#pragma once

#include <span>
#include <vector>

#include "fedsched/core.hpp"

namespace fedsched {

/// Target selection rates for the generalization score. IidBalanced aims every
/// client at m/K; NonIidWeighted aims client k at m*d_k / sum_j d_j, where
/// d_k = quality * data size.
struct GeneralizationSpec {
    enum class Mode { kIidBalanced, kNonIidWeighted };

    Mode mode = Mode::kIidBalanced;
    int beta = 1;
    std::vector<double> target_rate;

    static GeneralizationSpec iid_balanced(int num_clients, int num_channels, int beta);
    static GeneralizationSpec non_iid_weighted(std::span<const ClientProfile> profiles,
                                               int num_channels, int beta);

    void validate() const;
};

/// Signed balance score in [-1, 1]: positive while the client's selection rate
/// trails its target, zero at the target, negative beyond it. The rate is
/// count/denominator_rounds, with the convention rate = 0 when no round has
/// started yet.
double g_value_for_round(const GeneralizationSpec& spec, const SelectionHistory& history,
                         int client, int denominator_rounds);

/// Same score with the history's own completed-round count as denominator.
double g_value(const GeneralizationSpec& spec, const SelectionHistory& history, int client);

/// Raw sum of g_value over the set's members (callers apply any alpha/m scale).
double g_sum(const GeneralizationSpec& spec, const SelectionHistory& history,
             const SelectionSet& set);

double g_sum_for_round(const GeneralizationSpec& spec, const SelectionHistory& history,
                       const SelectionSet& set, int denominator_rounds);

}  // namespace fedsched
