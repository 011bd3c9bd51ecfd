#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kernclust {

using Rng = std::mt19937_64;

// One SplitMix64 step: golden-ratio increment, then the finalizer.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a root seed and a path of indices
// (cell, trial, method, restart, ...). The result does not depend on the
// order in which streams are created, so parallel sweeps are reproducible.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t root, std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(root, path));
}

}  // namespace kernclust
