#pragma once

#include <cstdint>

namespace hawkesdt {

inline constexpr std::uint64_t kSplitMix64Gamma = 0x9e3779b97f4a7c15ull;

// Output mixing function of the SplitMix64 generator (Vigna 2015, after
// Steele, Lea & Flood's splittable generators). Pure integer arithmetic,
// so a given seed produces the same stream on every platform.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// k-th output of the SplitMix64 stream started at `seed`, in O(1).
// The state after k steps is seed + k*gamma, so random access is a
// single mix of that state.
constexpr std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) {
    return splitmix64_mix(seed + (k + 1) * kSplitMix64Gamma);
}

// Seed for the `index`-th child stream of `seed`. Used to derive
// independent per-path streams from (master seed, path index).
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64_at(seed, index);
}

class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        return splitmix64_mix(state_ += kSplitMix64Gamma);
    }

    constexpr std::uint64_t operator()() { return next(); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform double in (0, 1); safe as a log() argument.
    double next_double_open() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ull; }

  private:
    std::uint64_t state_;
};

} // namespace hawkesdt
