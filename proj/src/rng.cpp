#include "homsim/rng.hpp"

#include <cmath>
#include <cstdint>

namespace homsim::rng {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next_u64() {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    // index + 1 keeps stream 0 distinct from the raw seed state.
    return SplitMix64{mix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1))};
}

namespace {

constexpr double kSmallMeanCutoff = 30.0;

std::uint64_t poisson_knuth(double mean, SplitMix64& gen) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double product = gen.next_unit();
    while (product > limit) {
        ++k;
        product *= gen.next_unit();
    }
    return k;
}

// Hormann's PTRD (transformed rejection with decomposition), exact for
// mean >= 10; used here from 30 up.
std::uint64_t poisson_ptrd(double mean, SplitMix64& gen) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = gen.next_unit() - 0.5;
        const double v = gen.next_unit();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double log_accept = k * loglam - std::lgamma(k + 1.0) - mean;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <= log_accept) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

} // namespace

std::uint64_t poisson_sample(double mean, SplitMix64& gen) {
    if (mean <= 0.0) {
        return 0;
    }
    if (mean < kSmallMeanCutoff) {
        return poisson_knuth(mean, gen);
    }
    return poisson_ptrd(mean, gen);
}

} // namespace homsim::rng
