#include "fedsched/rng.hpp"

#include <cmath>

namespace fedsched {

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose, std::uint64_t a,
                          std::uint64_t b) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ static_cast<std::uint64_t>(purpose));
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    return h;
}

std::mt19937_64 make_stream(std::uint64_t master, StreamPurpose purpose, std::uint64_t a,
                            std::uint64_t b) {
    return std::mt19937_64(derive_seed(master, purpose, a, b));
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) {
        return 0;
    }
    const std::uint64_t rem = std::mt19937_64::max() % n;
    // Rejection zone keeps the draw exactly uniform.
    std::uint64_t x = rng();
    while (x > std::mt19937_64::max() - rem - 1 && rem != n - 1) {
        x = rng();
    }
    return x % n;
}

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

double standard_normal(std::mt19937_64& rng) {
    // Box-Muller; u1 shifted away from zero so the log stays finite.
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace fedsched
