#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace softmdp {

// SplitMix64 (Steele/Lea/Vigna). Used to expand a 64-bit seed into stream
// state and to derive independent per-trial substream seeds.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    uint64_t state_;
};

// xoshiro256++ (Blackman/Vigna), state seeded with four SplitMix64 outputs.
// Every random draw in the artifact goes through this generator so that
// fixtures reproduce bit-for-bit across platforms and languages; the exact
// construction of uniforms and exponentials is documented in the README.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1): top 53 bits scaled by 2^-53.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1), strictly: ((x >> 11) + 0.5) * 2^-53.
    double uniform_open01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Standard exponential by inversion; strictly positive because the
    // underlying uniform is strictly inside (0, 1).
    double exponential() { return -std::log(uniform_open01()); }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<uint64_t, 4> state_{};
};

// Deterministic substream seed for trial `index` of a run seeded with `seed`.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    return SplitMix64(seed + (index + 1) * 0x9e3779b97f4a7c15ull).next();
}

}  // namespace softmdp
