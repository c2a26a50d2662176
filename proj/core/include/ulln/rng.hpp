#pragma once

// Counter-style seeding for the Monte Carlo engine.
//
// Every replicate owns a SplitMix64 stream whose state is derived from the
// master seed and the replicate coordinates through `derive_seed`. Nothing is
// shared between replicates, so results do not depend on how work is
// scheduled across threads.

#include <cstdint>
#include <initializer_list>

namespace ulln {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// seed = mix(...mix(mix(master) ^ mix(c0 + golden)) ^ mix(c1 + golden)...)
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> coords) noexcept {
    std::uint64_t s = mix64(master);
    for (std::uint64_t c : coords) {
        s = mix64(s ^ mix64(c + kGolden));
    }
    return s;
}

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t operator()() noexcept {
        state_ += kGolden;
        return mix64(state_);
    }

    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

    // Uniform on [2^-53, 1 - 2^-53]; never returns 0 or 1.
    constexpr double uniform() noexcept {
        constexpr double kUlp = 0x1.0p-53;
        double u = static_cast<double>((*this)() >> 11) * kUlp;
        if (u < kUlp) u = kUlp;
        if (u > 1.0 - kUlp) u = 1.0 - kUlp;
        return u;
    }

private:
    std::uint64_t state_;
};

}  // namespace ulln
