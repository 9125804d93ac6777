#pragma once

#include <cstdint>

namespace treeprob {

// SplitMix64 (Steele-Lea-Flood mixing constants). Pinned here so that every
// seeded result in the library is reproducible across platforms and runs.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0,n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t threshold = (~n + 1) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }
};

// Disjoint substream derivation: stream index is mixed into the seed before
// the generator starts.
inline SplitMix64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(seed ^ (0xA3EC647659359ACDULL * (stream + 1)));
}

}  // namespace treeprob
