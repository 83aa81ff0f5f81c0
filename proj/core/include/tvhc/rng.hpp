#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace tvhc {

/// SplitMix64 finalizer (Steele, Lea, Flood). Bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Folds a sequence of words into one seed: h = mix64(h ^ w) per word,
/// starting from h = mix64(base).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) noexcept {
    std::uint64_t h = mix64(base);
    for (std::uint64_t w : words) {
        h = mix64(h ^ w);
    }
    return h;
}

/// xoshiro256** 1.0 (Blackman, Vigna), state filled by SplitMix64 from the
/// seed. Satisfies UniformRandomBitGenerator; the output sequence is fixed
/// by the algorithm, so runs reproduce across platforms.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Exp(rate) by inversion.
    double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace tvhc
