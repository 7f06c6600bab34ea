#pragma once

#include <cstdint>
#include <cmath>

namespace fpf {

// splitmix64; used both as a generator and to derive stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic random stream. All sampling goes through this class so that
// results are reproducible across platforms (std:: distributions are
// implementation-defined and therefore avoided).
//
// Streams are splittable: split(k) derives an independent child stream from
// (seed, k), so parallel workers and lazily materialized point processes get
// stable per-index seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {
        // warm up so that small seeds do not produce correlated leading output
        for (int i = 0; i < 4; ++i) (void)splitmix64(state_);
    }

    std::uint64_t seed() const { return seed_; }

    Rng split(std::uint64_t stream) const {
        std::uint64_t s = seed_;
        std::uint64_t a = splitmix64(s);
        std::uint64_t t = a ^ (stream * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
        return Rng(splitmix64(t) ^ a);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform on the open interval (0,1).
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

    // Poisson(lambda) by the product-of-uniforms method. Only small means are
    // used in this project (lambda <= a few).
    int poisson(double lambda) {
        double limit = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

    // Exponential with the given rate.
    double exponential(double rate) { return -std::log(uniform01()) / rate; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace fpf
