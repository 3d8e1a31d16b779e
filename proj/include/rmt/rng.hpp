// Deterministic random number generation.
//
// Uses xoshiro256++ seeded through splitmix64 so that streams are
// byte-reproducible across platforms and standard-library versions
// (std::normal_distribution et al. are implementation-defined, so all
// variate transforms are done by hand here).  Child streams are derived
// by hashing (seed, index) pairs, which gives statistically independent
// substreams for per-sample parallelism with order-independent results.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace rmt {

inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    std::uint64_t seed() const { return seed_; }

    // Derive an independent substream; (seed, index) -> new seed by hashing.
    Rng child(std::uint64_t index) const {
        std::uint64_t s = seed_ ^ (0x100000001b3ULL * (index + 1));
        std::uint64_t derived = splitmix64(s);
        derived ^= splitmix64(s);
        return Rng(derived);
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

    // Uniform on [0,1) with 53 bits of mantissa.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1] (safe as a log argument).
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard real normal via Box-Muller (no cached spare: keeps the
    // stream position a pure function of the call count).
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        return r * std::cos(2.0 * M_PI * uniform());
    }

    // Standard complex normal, E z = E z^2 = 0, E|z|^2 = 1.
    std::complex<double> cnormal() {
        const double r = std::sqrt(-std::log(uniform_pos()));
        const double phi = 2.0 * M_PI * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    // Uniform phase e^{i theta}.
    std::complex<double> cphase() {
        const double phi = 2.0 * M_PI * uniform();
        return {std::cos(phi), std::sin(phi)};
    }

    // Bernoulli(p).
    bool bernoulli(double p) { return uniform() < p; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t state_[4];
};

}  // namespace rmt
