#pragma once

#include <cstdint>
#include <random>

namespace turnid {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of an independent stream keyed by (seed, stream). Used for per-tree,
/// per-fold, per-session and per-repetition generators so results do not depend
/// on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

}  // namespace turnid
