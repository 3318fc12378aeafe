/*
 * Deterministic seeding. Every stochastic operation takes an explicit
 * generator; independent sub-tasks (trials, restarts, workers) derive child
 * seeds from a 64-bit master seed with a fixed splittable scheme, so results
 * are reproducible across runs and thread counts.
 */

#pragma once

#include <cstdint>
#include <random>

namespace interferolab {

using Rng = std::mt19937_64;

/// Child seed for sub-task `index` of a task seeded with `master`.
/// SplitMix64 finalizer over master + (index+1)·golden-ratio increment.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace interferolab
