#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

#include "rwre/lattice.hpp"

namespace rwre {

/// SplitMix64 finaliser; used both as a hash and as the output function of CounterRng.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream key from a parent key and a list of tags.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t k = mix64(parent ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t t : tags) k = mix64(k ^ mix64(t + 0x9e3779b97f4a7c15ULL));
    return k;
}

std::uint64_t site_key(std::uint64_t seed, const Point& x, std::uint64_t stream = 0);

/// Counter-based generator: output n is mix64(key + (n + 1) * golden gamma).
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix64(key_ + counter_);
    }

    /// Uniform variate in (0, 1].
    double uniform() { return static_cast<double>((operator()() >> 11) + 1) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rwre
