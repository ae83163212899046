#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace unifield {

// Deterministic seed derivation. splitmix64 of (base, index) gives
// uncorrelated substreams, so each trial / UE / noise draw can own a stream
// whose value does not depend on evaluation order or worker count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++; fixed algorithm so results are bit-identical across
// platforms and standard library versions (std::normal_distribution is not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        // seed the state via splitmix64, never all-zero
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ull;
            std::uint64_t t = z;
            t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9ull;
            t = (t ^ (t >> 27)) * 0x94d049bb133111ebull;
            w = t ^ (t >> 31);
        }
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        std::uint64_t const result = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t const t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1): top 53 bits, same construction everywhere
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; draws pairs but returns one at a time
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double const u2 = uniform();
        double const r = std::sqrt(-2.0 * std::log(u1));
        double const a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // CN(0, var): real and imaginary parts each N(0, var/2)
    std::complex<double> cgaussian(double var = 1.0) {
        double const s = std::sqrt(var * 0.5);
        double const re = gaussian();
        double const im = gaussian();
        return {s * re, s * im};
    }

    // zero-mean Laplace with scale b (stddev b*sqrt(2))
    double laplace(double b) {
        double const u = uniform() - 0.5;
        double const m = std::abs(2.0 * u);
        double const v = -b * std::log(1.0 - m > 0.0 ? 1.0 - m : 5e-324);
        return u >= 0.0 ? v : -v;
    }

  private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace unifield
