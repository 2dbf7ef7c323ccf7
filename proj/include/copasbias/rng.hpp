#pragma once

#include <cstdint>

#include "copasbias/normal.hpp"

namespace copasbias {

// splitmix64 step; used to expand a single seed into xoshiro state.
inline std::uint64_t splitmix64_next(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ generator. Small, fast, and good enough statistically for
// Monte-Carlo work; every consumer in this library draws through this class
// so simulations are reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in (0,1): 53-bit mantissa, then nudged away from 0 so that
    // norm_ppf never sees an exact endpoint.
    double uniform01() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-54;
    }

    // Unbiased integer in [0, n) by rejection on the top of the range.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via inverse CDF. One uniform per variate keeps the
    // stream layout independent of rejection behaviour.
    double normal() { return norm_ppf(uniform01()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

inline std::uint64_t rotl_u64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Derives an independent generator for a numbered unit of work. Mixing the
// id through splitmix64 twice decorrelates neighbouring ids, so replicate k
// sees the same stream no matter how work is scheduled across threads.
inline Rng substream(std::uint64_t master_seed, std::uint64_t id) {
    std::uint64_t x = master_seed;
    std::uint64_t a = splitmix64_next(x);
    std::uint64_t y = id ^ 0x6a09e667f3bcc908ULL;
    std::uint64_t b = splitmix64_next(y);
    std::uint64_t z = a ^ rotl_u64(b, 32);
    return Rng(splitmix64_next(z));
}

}  // namespace copasbias
