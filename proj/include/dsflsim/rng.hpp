#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dsfl {

// Seeded RNG with implementation-independent derived draws.
//
// std::mt19937_64's raw output sequence is pinned by the standard, but the
// standard distributions are not. Everything downstream (uniform doubles,
// bounded integers, shuffles, normals) is therefore built directly on the
// raw engine output so that a given seed yields the same scenario, shard
// assignment, and weight init on every toolchain.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // uniform integer in [0, n), n > 0
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

    // standard normal via Box-Muller (two raw draws per sample)
    double normal() {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

// splitmix64 finalizer, used to derive independent substream seeds
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix_seed(base);
    s = mix_seed(s ^ (a + 0x517cc1b727220a95ULL));
    s = mix_seed(s ^ (b + 0x2545f4914f6cdd1dULL));
    s = mix_seed(s ^ (c + 0x9e6c63d0876a9a47ULL));
    return s;
}

}  // namespace dsfl
