#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace smscore {

// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Sub-seed derivation: seed' = mix(seed, k1, k2, ...). Order matters and every
// component passes through the finalizer, so neighbouring keys give unrelated streams.
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

// xoshiro256** with its state expanded from a single 64-bit seed by SplitMix64.
// Satisfies UniformRandomBitGenerator; the samplers below are exact and fixed so
// that draws are identical on every platform.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t z = seed;
        for (auto& s : state_) {
            s = splitmix64(z);
            z += 0x9e3779b97f4a7c15ULL;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
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

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound), Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Box-Muller; both variates of each pair are used.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double exponential() noexcept { return -std::log(uniform()); }

    // Chi-squared with integer degrees of freedom as a sum of squared normals.
    double chi_squared(int dof) noexcept {
        double s = 0.0;
        for (int i = 0; i < dof; ++i) {
            const double z = normal();
            s += z * z;
        }
        return s;
    }

    // Standard logistic by inverse CDF.
    double logistic() noexcept {
        const double u = uniform();
        return std::log(u / (1.0 - u));
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace smscore
