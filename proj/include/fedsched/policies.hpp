#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fedsched/core.hpp"
#include "fedsched/generalization.hpp"
#include "fedsched/optimizer.hpp"

namespace fedsched {

/// One client-selection strategy driving a run. select() for round t may only
/// read state from rounds 1..t-1; observe() folds the finished round into the
/// history.
class Policy {
  public:
    virtual ~Policy() = default;

    const std::string& label() const { return label_; }
    const SelectionHistory& history() const { return history_; }

    virtual SelectionSet select(std::span<const int> available, int round) = 0;
    virtual void observe(const SelectionSet& chosen, std::span<const double> latencies, int round);

  protected:
    Policy(std::string label, const SystemParams& params);

    void check_round(std::span<const int> available, int round) const;

    SystemParams params_;
    std::string label_;
    SelectionHistory history_;
};

struct SolverChoice {
    enum class Kind { kExhaustive, kSa, kAlsa };
    Kind kind = Kind::kExhaustive;
    AnnealerConfig annealer;
    std::int64_t enumeration_cap = kDefaultEnumerationCap;
};

/// UCB scheduler with the generalization bonus. Unobserved clients hold the
/// unobserved-infinite score until first selected; afterwards
/// ucb = mean speed + sqrt((m+1) ln t / c), refreshed for every observed
/// client at the end of each round.
class BsflPolicy : public Policy {
  public:
    BsflPolicy(std::string label, const SystemParams& params, GeneralizationSpec spec,
               SolverChoice solver, std::mt19937_64 solver_rng,
               std::optional<double> alpha_override = std::nullopt);

    SelectionSet select(std::span<const int> available, int round) override;
    void observe(const SelectionSet& chosen, std::span<const double> latencies,
                 int round) override;

    std::optional<double> ucb(int client) const;

    /// The per-round argmax input: UCB scores plus the g values for `round`.
    ScoreTable score_table(std::span<const int> available, int round) const;

  private:
    GeneralizationSpec spec_;
    SolverChoice solver_;
    std::mt19937_64 rng_;
    double effective_alpha_;
    std::vector<std::optional<double>> ucb_;
};

/// Speed-only UCB baseline: the scheduler above with the generalization term
/// switched off.
std::unique_ptr<BsflPolicy> make_latency_ucb_policy(const SystemParams& params,
                                                    GeneralizationSpec spec, SolverChoice solver,
                                                    std::mt19937_64 solver_rng);

class RandomUniformPolicy : public Policy {
  public:
    RandomUniformPolicy(std::string label, const SystemParams& params, std::mt19937_64 rng);

    SelectionSet select(std::span<const int> available, int round) override;

  private:
    std::mt19937_64 rng_;
};

/// Successive weighted sampling without replacement, weight = data size.
class RandomProportionalPolicy : public Policy {
  public:
    RandomProportionalPolicy(std::string label, const SystemParams& params,
                             std::vector<double> weights, std::mt19937_64 rng);

    SelectionSet select(std::span<const int> available, int round) override;

  private:
    std::vector<double> weights_;
    std::mt19937_64 rng_;
};

struct GenieResult {
    SelectionSet set;
    double expected_reward = 0.0;
};

/// Expected reward of a set under the true mean speeds and the g values of
/// the round the history is about to complete.
double expected_set_reward(const SelectionSet& set, std::span<const double> mu,
                           const SelectionHistory& history, const GeneralizationSpec& spec,
                           const SystemParams& params);

/// Exact oracle selection: argmax of min true mean speed plus the scaled
/// g-sum, fed by the running policy's history. Throws when the instance
/// exceeds the enumeration cap.
GenieResult genie_select(std::span<const double> mu, const SelectionHistory& history,
                         const GeneralizationSpec& spec, std::span<const int> available,
                         const SystemParams& params,
                         std::int64_t cap = kDefaultEnumerationCap);

}  // namespace fedsched
