#pragma once

// Counter-based seed splitting. One master seed expands into independent
// substreams keyed by integer counters, so parallel workers never share or
// reorder random draws.

#include <cstdint>
#include <random>

namespace degradex {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives a substream seed from a master seed and up to three counters.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(master ^ 0x5851f42d4c957f2dULL);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ (b + 0x14057b7ef767814fULL));
    s = splitmix64(s ^ (c + 0x27bb2ee687b0b0fdULL));
    return s;
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    return std::mt19937_64(split_seed(master, a, b, c));
}

}  // namespace degradex
