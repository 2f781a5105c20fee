#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gdmd {

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic random stream. Wraps std::mt19937_64 (bit-exact by the
/// standard) and derives uniform/normal variates directly from raw 64-bit
/// words, avoiding std::*_distribution whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Uniform double in [0, 1).
    double uniform();
    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal via Marsaglia's polar method.
    double normal();
    /// Uniform integer in {0, ..., n-1}; n must be positive.
    int uniform_int(int n);

    /// Independent child stream. Derived from the original seed and the tag
    /// only, so forks are stable no matter how much of this stream was used.
    Rng fork(std::string_view tag) const;
    Rng fork(std::uint64_t tag) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gdmd
