#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace moe {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from a parent seed and a path of stream indices.
///
/// The derivation folds each index into the running state as
/// `state = mix64(state ^ mix64(index + golden * (depth + 1)))`, so
/// (seed, {a, b}) and (seed, {b, a}) give unrelated streams. Experiment code
/// uses paths of the form {n_index, replication_index, role}.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

/// Stream roles used in seed paths.
enum class StreamRole : std::uint64_t {
    data = 1,
    init = 2,
    monte_carlo = 3,
    design = 4,
};

} // namespace moe
