#pragma once

#include <cstdint>
#include <random>

namespace survey {

/// Random source used by every stochastic operation.
using Rng = std::mt19937_64;

/// Derives the seed of an independent stream from a master seed.
///
/// Stream k of master seed m is seeded with splitmix64(m + (k+1) * 0x9E3779B97F4A7C15).
/// Replication r of an experiment uses stream r; nested streams (e.g. the
/// cross-validation folds inside a replication) apply the rule again to the
/// derived seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
    return Rng(split_seed(master, stream));
}

/// Uniform draw in [0, 1).
inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace survey
