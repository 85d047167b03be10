#ifndef PMLAB_RNG_HPP
#define PMLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pmlab::rng {

// SplitMix64 output function (Steele, Lea, Flood / Vigna). Used both as the
// stream generator and as the key-mixing function, so every draw is a pure
// function of (seed, derivation path, counter).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive a child key from a parent key and an index. Chaining derive() along
// a label path gives per-node keys that are independent of evaluation order.
inline constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t index) {
    return mix64(key ^ (0x8e9fbc440fULL * (index + 1)) ^ (key << 13));
}

// Counter-based stream: state advances by a fixed odd gamma, output is mix64.
class Stream {
  public:
    explicit constexpr Stream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0, 1]; never returns 0 so log() below stays finite.
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on [0, 1).
    double next_unit_co() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on the open interval (0, 1); safe for quantile transforms.
    double next_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_exponential(double rate) { return -std::log(next_unit()) / rate; }

    // Unbiased-enough index draw for resampling pools (n << 2^64).
    std::uint64_t next_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(next_unit_co() * static_cast<double>(n));
    }

  private:
    std::uint64_t state_;
};

// Weight of a single cell as a pure function of (seed, cell id, rate).
inline double cell_exponential(std::uint64_t seed, std::uint64_t cell, double rate) {
    std::uint64_t z = mix64(mix64(seed ^ 0x7f4a7c15u) ^ mix64(cell + 0x632be59bd9b4e019ULL));
    double u = static_cast<double>((z >> 11) + 1) * 0x1.0p-53;
    return -std::log(u) / rate;
}

}  // namespace pmlab::rng

#endif
