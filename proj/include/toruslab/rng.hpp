#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "toruslab/numerics.hpp"

namespace toruslab {

/// Counter-based generator: value(i) = splitmix64(seed + i * golden).
/// Stateless draws indexed by a counter, so any witness is reproducible
/// from (seed, counter) alone and streams can be split by hashing labels
/// into fresh seeds.
class CounterRng {
  public:
    explicit CounterRng(uint64_t seed) : seed_(seed) {}

    /// Independent substream for (label, index), e.g. one per scan point.
    CounterRng substream(uint64_t label, uint64_t index = 0) const {
        uint64_t s = seed_;
        s = mix(s ^ (0x9e3779b97f4a7c15ull + label));
        s = mix(s ^ (0xbf58476d1ce4e5b9ull + index));
        return CounterRng(s);
    }

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return mix(seed_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    /// Complex standard normal (unit variance per component).
    cxd next_complex_gaussian() {
        const double re = next_gaussian();
        const double im = next_gaussian();
        return {re, im};
    }

  private:
    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t seed_;
    uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace toruslab
