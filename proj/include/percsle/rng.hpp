#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. SC'11).
//
// Every random quantity in the library is a pure function of a 64-bit key
// and a 128-bit counter, so results never depend on scheduling or on the
// order in which values are requested.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace percsle {

using Counter = std::array<std::uint32_t, 4>;

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace detail

/// Philox4x32 with 10 rounds.
constexpr Counter philox4x32(Counter ctr, std::uint64_t key)
{
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
        detail::mulhilo(detail::kPhiloxM0, ctr[0], hi0, lo0);
        detail::mulhilo(detail::kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += detail::kPhiloxW0;
        k1 += detail::kPhiloxW1;
    }
    return ctr;
}

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// FNV-1a, used for experiment ids and config hashes.
constexpr std::uint64_t fnv1a64(std::string_view text)
{
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Seed of sample `index` of experiment `experiment` under `root`.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t experiment, std::uint64_t index)
{
    const Counter out = philox4x32({static_cast<std::uint32_t>(index),
                                    static_cast<std::uint32_t>(index >> 32),
                                    static_cast<std::uint32_t>(experiment),
                                    static_cast<std::uint32_t>(experiment >> 32)},
                                   root);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Uniform double in (0, 1) built from two 32-bit words. 52 bits plus the half
/// offset keep the largest value at 1 - 2^-53, which is representable.
constexpr double to_unit_open(std::uint32_t hi, std::uint32_t lo)
{
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/// Stream of uniforms/normals keyed by a seed; value i depends only on (seed, stream, i).
class CounterStream {
public:
    constexpr CounterStream(std::uint64_t seed, std::uint32_t stream = 0) : seed_(seed), stream_(stream) {}

    /// Two uniforms in (0,1) for block `i`.
    std::array<double, 2> uniforms(std::uint64_t i) const
    {
        const Counter out = philox4x32({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32),
                                        stream_, 0x5EEDu},
                                       seed_);
        return {to_unit_open(out[0], out[1]), to_unit_open(out[2], out[3])};
    }

    double uniform(std::uint64_t i) const { return uniforms(i / 2)[i % 2]; }

    /// Standard normal number i (Box-Muller on block i/2).
    double normal(std::uint64_t i) const
    {
        const auto u = uniforms(i / 2);
        const double radius = std::sqrt(-2.0 * std::log(u[0]));
        const double angle = 2.0 * std::numbers::pi * u[1];
        return (i % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint32_t stream_;
};

} // namespace percsle
