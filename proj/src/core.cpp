#include "fedsched/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fedsched {

void SystemParams::validate() const {
    if (num_clients < 1) {
        throw std::invalid_argument("num_clients must be >= 1");
    }
    if (num_channels < 1 || num_channels > num_clients) {
        throw std::invalid_argument("num_channels must satisfy 1 <= m <= num_clients");
    }
    if (!(tau_min > 0.0)) {
        throw std::invalid_argument("tau_min must be > 0");
    }
    if (!(tau_max > tau_min)) {
        throw std::invalid_argument("tau_max must be > tau_min");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("alpha must be >= 0");
    }
    if (beta < 1) {
        throw std::invalid_argument("beta must be a natural number >= 1");
    }
    if (!(delta_min > 0.0)) {
        throw std::invalid_argument("delta_min must be > 0");
    }
}

SelectionSet::SelectionSet(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i] < 0) {
            throw std::invalid_argument("selection member ids must be non-negative");
        }
        if (i > 0 && members_[i] == members_[i - 1]) {
            throw std::invalid_argument("selection members must be distinct");
        }
    }
}

SelectionSet::SelectionSet(std::initializer_list<int> members)
    : SelectionSet(std::vector<int>(members)) {}

bool SelectionSet::contains(int id) const {
    return std::binary_search(members_.begin(), members_.end(), id);
}

std::string SelectionSet::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i > 0) {
            out << ';';
        }
        out << members_[i];
    }
    return out.str();
}

SelectionHistory::SelectionHistory(int num_clients)
    : count_(static_cast<std::size_t>(num_clients), 0),
      mean_(static_cast<std::size_t>(num_clients), 0.0) {
    if (num_clients < 1) {
        throw std::invalid_argument("history needs at least one client");
    }
}

int SelectionHistory::count(int client) const {
    if (client < 0 || client >= num_clients()) {
        throw std::invalid_argument("client id out of range");
    }
    return count_[static_cast<std::size_t>(client)];
}

double SelectionHistory::mean_speed(int client) const {
    if (count(client) == 0) {
        throw std::logic_error("mean_speed is undefined for an unobserved client");
    }
    return mean_[static_cast<std::size_t>(client)];
}

std::int64_t SelectionHistory::total_count() const {
    std::int64_t total = 0;
    for (int c : count_) {
        total += c;
    }
    return total;
}

void SelectionHistory::record(int client, double speed) {
    if (client < 0 || client >= num_clients()) {
        throw std::invalid_argument("client id out of range");
    }
    auto k = static_cast<std::size_t>(client);
    const double old_count = static_cast<double>(count_[k]);
    count_[k] += 1;
    mean_[k] = (mean_[k] * old_count + speed) / static_cast<double>(count_[k]);
}

Energy Energy::finite(double value, double tiebreak_g) {
    if (!std::isfinite(value) || !std::isfinite(tiebreak_g)) {
        throw std::invalid_argument("finite energy requires finite components");
    }
    Energy e;
    e.finite_ = true;
    e.value_ = value;
    e.tiebreak_g_ = tiebreak_g;
    return e;
}

Energy Energy::unobserved(double tiebreak_g) {
    if (!std::isfinite(tiebreak_g)) {
        throw std::invalid_argument("energy tiebreak must be finite");
    }
    Energy e;
    e.finite_ = false;
    e.value_ = 0.0;
    e.tiebreak_g_ = tiebreak_g;
    return e;
}

double Energy::value() const {
    if (!finite_) {
        throw std::logic_error("unobserved-infinite energy has no finite value");
    }
    return value_;
}

int Energy::compare(const Energy& a, const Energy& b) {
    if (a.finite_ != b.finite_) {
        return a.finite_ ? -1 : 1;
    }
    if (a.finite_) {
        if (a.value_ != b.value_) {
            return a.value_ < b.value_ ? -1 : 1;
        }
    }
    if (a.tiebreak_g_ != b.tiebreak_g_) {
        return a.tiebreak_g_ < b.tiebreak_g_ ? -1 : 1;
    }
    return 0;
}

std::string Energy::to_string() const {
    std::ostringstream out;
    if (finite_) {
        out << value_;
    } else {
        out << "inf(g=" << tiebreak_g_ << ")";
    }
    return out.str();
}

double speed_of(double latency, const SystemParams& params) {
    if (!(latency > 0.0)) {
        throw std::invalid_argument("latency must be positive");
    }
    const double clipped = std::clamp(latency, params.tau_min, params.tau_max);
    return params.tau_min / clipped;
}

void record_observation(SelectionHistory& history, int client, double latency,
                        const SystemParams& params) {
    history.record(client, speed_of(latency, params));
}

std::int64_t binomial_capped(int n, int k, std::int64_t cap) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::int64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays integral at every step
        const double projected = static_cast<double>(result) * (n - k + i) / i;
        if (projected > static_cast<double>(cap) * 2.0) {
            return cap + 1;
        }
        result = result * (n - k + i) / i;
        if (result > cap) {
            return cap + 1;
        }
    }
    return result;
}

}  // namespace fedsched
