#pragma once

#include <array>
#include <cstdint>

namespace frontlab {

// SplitMix64 output mixer. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based replica seed derivation: injective in the replica index for a
// fixed master seed, and well mixed so replica streams are uncorrelated.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica) {
    return mix64(master ^ mix64(replica * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
}

// xoshiro256++ with all distribution samplers implemented locally, so that a
// given seed produces the same stream on every platform and toolchain.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : state_) w = mix64(z++);
        have_spare_ = false;
        spare_ = 0.0;
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

    // Uniform on [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal();
    double exponential(double rate);
    std::uint64_t poisson(double mean);
    std::uint64_t binomial(std::uint64_t n, double p);

    // Index uniform on {0,...,n-1} via rejection (exact, no modulo bias).
    std::uint64_t uniform_index(std::uint64_t n);

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t binomial_inversion(std::uint64_t n, double p);
    std::uint64_t binomial_btrs(std::uint64_t n, double p);
    std::uint64_t poisson_inversion(double mean);
    std::uint64_t poisson_ptrs(double mean);

    std::array<std::uint64_t, 4> state_;
    bool have_spare_;
    double spare_;
};

}  // namespace frontlab
