#pragma once

#include <cmath>
#include <cstdint>

namespace monospline {

/// Deterministic PRNG with explicitly coded output distributions.
///
/// Standard-library distributions are implementation-defined, so every draw
/// here (uniform, normal, integer) is spelled out to make seeded runs
/// reproducible across compilers. Substreams derived from (seed, index) let
/// bootstrap replicates and simulation repetitions run in parallel while
/// matching the serial order exactly.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : seed_(seed), state_(splitmix(seed ^ 0x9e3779b97f4a7c15ULL) | 1) {
        next();
        next();
    }

    /// Independent stream for replicate/repetition `index` of this seed.
    Rng substream(std::uint64_t index) const { return Rng(mix(seed_, index)); }

    std::uint64_t next() {
        // xorshift* step
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (pairwise, cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t v = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
        return v < n ? v : n - 1;
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        return splitmix(a + 0x9e3779b97f4a7c15ULL * (b + 1));
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace monospline
