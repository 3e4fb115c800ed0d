#ifndef SACR_RNG_HPP
#define SACR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace sacr {

// splitmix64 step, used for seed mixing and stream derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent stream seed from (seed, a, b). Used so that folds,
// repeats and grid points get decoupled, reproducible randomness.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(seed) ^ a) ^ (b * 0x9e3779b97f4a7c15ULL + 1));
}

// Deterministic RNG with a fixed output algorithm. std::normal_distribution
// and std::shuffle are implementation-defined, so the transforms are done
// by hand to keep outputs identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller (cosine branch only)
    double normal() {
        const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // uniform integer in [0, n), rejection sampled to avoid modulo bias
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_int(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace sacr

#endif
