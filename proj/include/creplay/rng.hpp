#pragma once

#include <cstdint>
#include <random>

namespace creplay {

// All stochastic code draws from one named generator type so that runs are
// reproducible from a seed alone.
using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent stream seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed for sub-stream `stream` of `base`. Streams 0,1,2,... are mutually
// independent for practical purposes, which lets batches run in parallel
// while staying byte-identical to serial execution.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base + 0x632be59bd9b4e019ull * (stream + 1);
    return splitmix64(s);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0,n). Multiply-shift; bias is < 2^-32 for n below 2^32,
// negligible for grid-sized ranges.
inline std::uint32_t uniform_below(Rng& rng, std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace creplay
