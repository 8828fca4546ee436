#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gcimb {

/// Deterministic RNG used throughout; one instance per execution context
/// (one Monte-Carlo run, one sensor node) so runs never share state.
using Rng = std::mt19937_64;

/// splitmix64 step; the standard mixer for deriving decorrelated seeds.
[[nodiscard]] inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent child seed from a base seed and a salt path
/// (e.g. {run index, node id}). Same inputs always give the same stream.
[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t base,
                                               std::initializer_list<std::uint64_t> salts) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    for (std::uint64_t salt : salts) {
        s ^= salt + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        (void)splitmix64(s);
    }
    return splitmix64(s);
}

[[nodiscard]] inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> salts) {
    return Rng(derive_seed(base, salts));
}

} // namespace gcimb
