#pragma once

#include <cstdint>
#include <random>

namespace pspin {

// splitmix64; used to derive independent seed streams from one base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream tags keep disorder draws, trajectories and Monte-Carlo samples
// on disjoint deterministic streams of the same base seed.
enum class SeedStream : std::uint64_t {
    Disorder   = 0x1111,
    Trajectory = 0x2222,
    McSample   = 0x3333,
};

inline std::uint64_t derive_seed(std::uint64_t base, SeedStream stream,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(base ^ static_cast<std::uint64_t>(stream)) + index);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace pspin
