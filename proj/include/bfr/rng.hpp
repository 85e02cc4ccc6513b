#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace bfr {

uint64_t splitmix64(uint64_t& state);

/// FNV-1a 64-bit hash of a byte string.
uint64_t fnv1a64(const std::string& s);

/// Derives a stream seed from a master seed and a name (used for per-image
/// and per-parameter seeding so that work order and parallelism never
/// change the random draws).
uint64_t derive_seed(uint64_t master, const std::string& name);

/// xoshiro256++ generator with explicit state so it can be checkpointed.
/// Normal deviates use a stateless Box-Muller pair per call; the generator
/// state is exactly the four words below, nothing cached.
class Rng {
public:
    explicit Rng(uint64_t seed = 0);

    uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();
    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi], both inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi);
    /// Standard normal deviate.
    double normal();

    std::array<uint64_t, 4> state() const { return s_; }
    void set_state(const std::array<uint64_t, 4>& s) { s_ = s; }

private:
    std::array<uint64_t, 4> s_{};
};

}  // namespace bfr
