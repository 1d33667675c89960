#pragma once

#include <cstdint>
#include <random>

namespace rydbench {

// Counter-based seeding: every (seed, stream) pair gets an independent,
// reproducible generator, so shot m / trajectory k / model i can be computed
// in any order (or in parallel) without sharing generator state.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t stream_seed(uint64_t seed, uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ull));
}

inline std::mt19937_64 make_rng(uint64_t seed, uint64_t stream = 0) {
    return std::mt19937_64(stream_seed(seed, stream));
}

}  // namespace rydbench
