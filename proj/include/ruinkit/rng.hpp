#pragma once

#include <cstdint>
#include <cmath>
#include <limits>

namespace ruinkit {

// SplitMix64 step; used to expand a (seed, stream) key into generator state.
inline std::uint64_t splitmix64_next(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with substreams keyed by (seed, stream). Simulation results
// depend only on the key, never on thread scheduling: every path owns the
// substream keyed by its index. Satisfies UniformRandomBitGenerator, so it
// also drives the <random> distributions.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t key = seed ^ (stream * 0xD2B74407B1CE6E93ULL + 0x9E3779B97F4A7C15ULL);
        for (auto& word : state_) word = splitmix64_next(key);
        // splitmix never yields four zero words for distinct keys, but the
        // all-zero state is absorbing, so guard anyway
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
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

    // Uniform draw on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Exponential draw by inversion; rate must be positive.
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace ruinkit
