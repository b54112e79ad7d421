#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cda {

/// Finalizer from splitmix64; bijective on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream-splitting rule used everywhere a child stream is needed:
/// the master seed is chained through splitmix64 with each key word.
/// Example: the compression matrix for (replication r, class g) uses
/// derive_seed(master, {r, g}).
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> words) {
    std::uint64_t state = splitmix64(master);
    for (std::uint64_t w : words) {
        state = splitmix64(state ^ splitmix64(w));
    }
    return state;
}

/// The one generator type used by the library. Draws are deterministic
/// for a given seed and standard library; bit-equality across standard
/// library implementations is not promised.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

/// k distinct indices drawn uniformly from [0, n), returned ascending
/// (Floyd's algorithm, O(k) draws).
std::vector<std::int64_t> sample_without_replacement(std::int64_t n, std::int64_t k, Rng& rng);

} // namespace cda
