#pragma once

#include <cstdint>

namespace teqsci {

// SplitMix64 (Steele/Lea/Flood). Fixed algorithm so that sampled shot
// batches are bit-reproducible across platforms and standard-library
// implementations; std::mt19937 distributions are not portable.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Derive an independent stream, e.g. one per (dt, state) pair.
    SplitMix64 fork(std::uint64_t salt) {
        SplitMix64 mix(state_ ^ (salt * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
        return SplitMix64(mix.next());
    }

  private:
    std::uint64_t state_;
};

}  // namespace teqsci
