#pragma once

#include "hyperrank/common.hpp"

#include <cstdint>
#include <random>

namespace hyperrank {

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Deterministic random source. mt19937_64 supplies bits; the uniform and
/// normal mappings are hand-rolled so streams are identical across standard
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    Scalar uniform() { return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53; }

    Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound) by rejection (bound > 0).
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller (one draw per call, no cached spare).
    Scalar normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace hyperrank
