#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cofuse {

/// The random engine used throughout. Every stochastic operation takes one explicitly.
using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Derives an independent stream seed from a base seed and a tag path,
/// e.g. derive_seed(run_seed, {kMeasurementStream, node, scan}).
/// Streams for distinct tag paths are decorrelated, so node and sensor work can be
/// scheduled in any order without changing results.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = detail::splitmix64(seed);
    for (auto t : tags) {
        h = detail::splitmix64(h ^ detail::splitmix64(t + 0x632be59bd9b4e019ULL));
    }
    return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    return Rng{derive_seed(seed, tags)};
}

} // namespace cofuse
