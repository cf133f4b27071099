#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fedsched {

/// Global knobs of one scheduling problem instance. K clients share m uplink
/// channels; latencies are clipped to [tau_min, tau_max]; alpha trades the
/// speed term of the reward against the generalization term.
struct SystemParams {
    int num_clients = 0;   // K
    int num_channels = 0;  // m
    double alpha = 1.0;
    int beta = 1;
    double tau_min = 1.0;
    double tau_max = 10.0;
    double delta_min = 0.1;  // reward grid used only by the regret-bound calculator
    std::uint64_t rng_seed = 0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class LatencyFamily { kFixed, kLogNormal, kExponential };

/// Latency distribution descriptor. Raw draws are clipped to
/// [tau_min, tau_max] before use; mean_speed caches E[tau_min / clip(tau)]
/// for the clipped law (exact for kFixed, Monte-Carlo otherwise).
struct LatencyLaw {
    LatencyFamily family = LatencyFamily::kFixed;
    double a = 1.0;  // kFixed: constant seconds; kLogNormal: log-mean; kExponential: rate
    double b = 0.0;  // kLogNormal: log-sd; unused otherwise
    double mean_speed = 1.0;
};

struct ClientProfile {
    int id = 0;
    LatencyLaw law;
    std::int64_t data_size = 1;
    double data_quality = 1.0;

    double significance() const { return data_quality * static_cast<double>(data_size); }
};

/// An m-subset of client ids, kept sorted. Ordering is lexicographic on the
/// member list, which is the global tie-break rule for selections.
class SelectionSet {
  public:
    SelectionSet() = default;
    explicit SelectionSet(std::vector<int> members);
    SelectionSet(std::initializer_list<int> members);

    const std::vector<int>& members() const { return members_; }
    int size() const { return static_cast<int>(members_.size()); }
    bool contains(int id) const;

    friend bool operator==(const SelectionSet&, const SelectionSet&) = default;
    friend auto operator<=>(const SelectionSet& a, const SelectionSet& b) {
        return a.members_ <=> b.members_;
    }

    std::string to_string() const;  // "0;3;7"

  private:
    std::vector<int> members_;
};

/// Per-client selection counters and sample-mean speeds; the sufficient
/// statistic for both the UCB scores and the generalization function.
/// rounds() counts completed rounds; counters change via record(), the round
/// counter only via advance_round().
class SelectionHistory {
  public:
    SelectionHistory() = default;
    explicit SelectionHistory(int num_clients);

    int num_clients() const { return static_cast<int>(count_.size()); }
    int rounds() const { return rounds_; }
    int count(int client) const;
    bool observed(int client) const { return count(client) > 0; }
    double mean_speed(int client) const;  // throws while unobserved
    std::int64_t total_count() const;

    void advance_round() { ++rounds_; }
    void record(int client, double speed);

  private:
    int rounds_ = 0;
    std::vector<int> count_;
    std::vector<double> mean_;
};

/// Extended-real score of a candidate selection. A set touching any
/// unobserved client sits above every finite energy; two such sets compare by
/// their g-sum term. Total order, no NaNs admitted.
class Energy {
  public:
    Energy() = default;
    static Energy finite(double value, double tiebreak_g);
    static Energy unobserved(double tiebreak_g);

    bool is_finite() const { return finite_; }
    double value() const;  // throws for the unobserved kind
    double tiebreak_g() const { return tiebreak_g_; }

    // negative if a < b, 0 if equivalent, positive if a > b
    static int compare(const Energy& a, const Energy& b);

    friend bool operator==(const Energy& a, const Energy& b) { return compare(a, b) == 0; }
    friend bool operator<(const Energy& a, const Energy& b) { return compare(a, b) < 0; }
    friend bool operator>(const Energy& a, const Energy& b) { return compare(a, b) > 0; }
    friend bool operator<=(const Energy& a, const Energy& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const Energy& a, const Energy& b) { return compare(a, b) >= 0; }

    std::string to_string() const;

  private:
    bool finite_ = true;
    double value_ = 0.0;
    double tiebreak_g_ = 0.0;
};

/// Normalized speed tau_min / clip(latency, tau_min, tau_max) in
/// [tau_min/tau_max, 1]. Throws on non-positive latency.
double speed_of(double latency, const SystemParams& params);

/// Increment the client's counter and fold speed_of(latency) into its running
/// mean. Does not advance the round counter.
void record_observation(SelectionHistory& history, int client, double latency,
                        const SystemParams& params);

/// (K choose m), saturating at cap + 1 to keep feasibility checks overflow-free.
std::int64_t binomial_capped(int n, int k, std::int64_t cap);

}  // namespace fedsched
