#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace xfid {

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// FNV-1a over a string, for per-item seeds that must not depend on the
/// standard library's std::hash.
std::uint64_t stable_hash(std::string_view text);

/// Fisher-Yates permutation of [0, n) driven by raw mt19937_64 output, so the
/// result is identical across standard library implementations
/// (std::shuffle is not).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace xfid
