#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>

#include "segiso/errors.hpp"

namespace segiso {

// Deterministic, platform-independent generator (xoshiro256** seeded via
// splitmix64). Every randomized stage in the library draws from this so that
// identical seeds give byte-identical artifacts on any platform; std::shuffle
// and <random> distributions are implementation-defined and are avoided.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    // Independent substream derived from (seed, key, index). Used wherever
    // work is sharded (bootstrap resamples, per-world generation) so results
    // do not depend on scheduling order.
    static Rng stream(std::uint64_t seed, std::string_view key, std::uint64_t index) {
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64 offset basis
        for (unsigned char ch : key) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        std::uint64_t x = seed;
        std::uint64_t mixed = splitmix64(x) ^ h;
        mixed ^= index * 0x9e3779b97f4a7c15ULL;
        return Rng(mixed);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw_error(Errc::invalid_argument, "Rng::below(0)");
        const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) return x % n;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; two uniforms per draw, no cached state.
    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Index draw proportional to non-negative weights.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw_error(Errc::invalid_argument, "categorical: weights sum to zero");
        double u = uniform() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            if (u < weights[i]) return i;
            u -= weights[i];
        }
        return weights.size() - 1;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace segiso
