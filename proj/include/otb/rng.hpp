#pragma once

#include <cstdint>
#include <string_view>

namespace otb {

// splitmix64 step; used for seed expansion and stream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a over a string tag, for deriving named child seeds.
std::uint64_t fnv1a64(std::string_view s);

// Child seed derivation: every component draws its own stream from the
// master seed and a tag, so adding draws to one component never shifts
// another. derive_seed(m, "a", 0) != derive_seed(m, "a", 1) etc.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

// xoshiro256++ with hand-rolled distributions. The standard <random>
// distributions are not bit-stable across library implementations; this
// generator is, which the reproducibility guarantees rely on.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t next_u64();

    // Uniform in [0,1) with 53 random bits.
    double uniform01();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal via Box-Muller; one spare value is cached.
    double gaussian();

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace otb
