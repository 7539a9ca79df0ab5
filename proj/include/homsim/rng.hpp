#pragma once

#include <cstdint>

namespace homsim::rng {

// SplitMix64 finalizer. Full 64-bit avalanche, pure integer arithmetic, so
// streams are reproducible across platforms and thread counts.
std::uint64_t mix64(std::uint64_t z);

struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 random bits.
    double next_unit();
};

// Independent stream for one sweep/simulation point. Streams derived from the
// same seed but different indices never share state, which is what makes the
// parallel kernels bit-identical to the serial ones.
SplitMix64 substream(std::uint64_t seed, std::uint64_t index);

// Poisson draw. Inversion by sequential search for small means, Hormann's
// PTRD transformed rejection above the cutoff. mean must be finite,
// nonnegative and at most 1e12.
std::uint64_t poisson_sample(double mean, SplitMix64& gen);

} // namespace homsim::rng
