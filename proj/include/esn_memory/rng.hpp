#pragma once

// Seeded random streams. Every stream is an mt19937_64 engine seeded from a
// SplitMix64 hash of (parent seed, path of integers), so each role gets an
// independent, reproducible substream. Variates are produced by the transforms
// below rather than <random> distributions, whose output is
// implementation-defined.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string_view>

namespace esn_memory {

inline constexpr std::string_view kRngVersion = "esn-rng-v1";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a path of integers into a child seed.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = splitmix64(parent);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

/// Role tags for substreams drawn from a reservoir or experiment seed.
enum class StreamRole : std::uint64_t {
    recurrent_weights = 1,
    input_weights = 2,
    input_stream = 3,
    system = 4,
    trial = 5,
};

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal by Box-Muller; the second variate of each pair is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 == 0.0);
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline RandomStream make_stream(std::uint64_t seed, StreamRole role, std::uint64_t index = 0)
{
    return RandomStream(derive_seed(seed, {static_cast<std::uint64_t>(role), index}));
}

}  // namespace esn_memory
