#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace riccati {

/// Counter-based normal generator keyed by (seed, path, step): stateless,
/// reproducible and safe to evaluate from any number of workers.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Standard normal via Box-Muller on two counter-derived uniforms.
    double normal(std::uint64_t path, std::uint64_t step) const {
        std::uint64_t h = mix(mix(mix(seed_ + 0x632BE59BD9B4E019ULL) ^ path) ^ step);
        std::uint64_t h2 = mix(h ^ 0xD1B54A32D192ED03ULL);
        double u1 = unit_open(h);
        double u2 = unit(h2);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t seed() const { return seed_; }

private:
    static double unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1p-53; }
    static double unit_open(std::uint64_t x) {
        return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;  // in (0, 1]
    }

    std::uint64_t seed_;
};

}  // namespace riccati
