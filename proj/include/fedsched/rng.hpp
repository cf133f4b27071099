#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fedsched {

// Every random decision in a run pulls from a stream derived from the master
// seed plus a purpose tag and up to two context words (client id, policy label
// hash, instance index, ...). Streams are independent of run order, so adding
// a policy or reordering seeds never perturbs another run's draws.
enum class StreamPurpose : std::uint64_t {
    kScenario = 1,
    kMuEstimate = 2,
    kEnvironment = 3,
    kAvailability = 4,
    kPolicy = 5,
    kSolver = 6,
    kDataset = 7,
    kRace = 8,
};

std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose, std::uint64_t a = 0,
                          std::uint64_t b = 0);

std::mt19937_64 make_stream(std::uint64_t master, StreamPurpose purpose, std::uint64_t a = 0,
                            std::uint64_t b = 0);

std::uint64_t fnv1a(std::string_view s);

// Uniform draw from [0, n) without modulo bias.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(std::mt19937_64& rng);

// Uniform double in [lo, hi].
double uniform_range(std::mt19937_64& rng, double lo, double hi);

// Standard normal via Box-Muller; one value per call, no state carried over.
double standard_normal(std::mt19937_64& rng);

}  // namespace fedsched
