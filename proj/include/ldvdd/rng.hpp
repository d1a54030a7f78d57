#pragma once

#include <cstdint>
#include <random>

namespace ldvdd {

using Engine = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Independent engine for (seed, replication, substream). The state depends
/// only on the key, so replications can run on any thread in any order.
inline Engine make_stream(std::uint64_t seed, std::uint64_t replication,
                          std::uint64_t substream = 0) {
    const std::uint64_t a = detail::splitmix64(seed);
    const std::uint64_t b = detail::splitmix64(a ^ detail::splitmix64(replication + 1));
    const std::uint64_t c = detail::splitmix64(b ^ detail::splitmix64(substream + 0x51ed2701ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    return Engine(seq);
}

}  // namespace ldvdd
