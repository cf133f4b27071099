#include "fedsched/generalization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedsched {

GeneralizationSpec GeneralizationSpec::iid_balanced(int num_clients, int num_channels, int beta) {
    GeneralizationSpec spec;
    spec.mode = Mode::kIidBalanced;
    spec.beta = beta;
    spec.target_rate.assign(static_cast<std::size_t>(num_clients),
                            static_cast<double>(num_channels) / num_clients);
    spec.validate();
    return spec;
}

GeneralizationSpec GeneralizationSpec::non_iid_weighted(std::span<const ClientProfile> profiles,
                                                        int num_channels, int beta) {
    GeneralizationSpec spec;
    spec.mode = Mode::kNonIidWeighted;
    spec.beta = beta;
    double total = 0.0;
    for (const auto& p : profiles) {
        if (!(p.significance() > 0.0)) {
            throw std::invalid_argument("non-iid targets need positive client significance");
        }
        total += p.significance();
    }
    spec.target_rate.reserve(profiles.size());
    for (const auto& p : profiles) {
        spec.target_rate.push_back(num_channels * p.significance() / total);
    }
    spec.validate();
    return spec;
}

void GeneralizationSpec::validate() const {
    if (beta < 1) {
        throw std::invalid_argument("beta must be a natural number >= 1");
    }
    if (target_rate.empty()) {
        throw std::invalid_argument("target rates are empty");
    }
    for (double r : target_rate) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("target rates must be finite and non-negative");
        }
    }
}

double g_value_for_round(const GeneralizationSpec& spec, const SelectionHistory& history,
                         int client, int denominator_rounds) {
    const double target = spec.target_rate.at(static_cast<std::size_t>(client));
    const double rate =
        denominator_rounds <= 0
            ? 0.0
            : static_cast<double>(history.count(client)) / denominator_rounds;
    const double diff = target - rate;
    const double magnitude = std::pow(std::abs(diff), spec.beta);
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    return std::clamp(magnitude * sign, -1.0, 1.0);
}

double g_value(const GeneralizationSpec& spec, const SelectionHistory& history, int client) {
    return g_value_for_round(spec, history, client, history.rounds());
}

double g_sum_for_round(const GeneralizationSpec& spec, const SelectionHistory& history,
                       const SelectionSet& set, int denominator_rounds) {
    double total = 0.0;
    for (int k : set.members()) {
        total += g_value_for_round(spec, history, k, denominator_rounds);
    }
    return total;
}

double g_sum(const GeneralizationSpec& spec, const SelectionHistory& history,
             const SelectionSet& set) {
    return g_sum_for_round(spec, history, set, history.rounds());
}

}  // namespace fedsched
