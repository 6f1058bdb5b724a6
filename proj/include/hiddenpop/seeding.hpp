#pragma once

#include <cstdint>
#include <random>

namespace hiddenpop {

using Rng = std::mt19937_64;

// Seed derivation tree. Every random stage gets its own seed computed from
// its parent with a SplitMix64 mix of (parent, stream), so stages and
// parallel workers never share a generator:
//
//   master --kGraph--> pop_size --> graph index            = graph seed
//   graph seed --kTrial--> trial index                     = trial seed
//   trial seed --kCapture / kRecapture / kHash / ...       = stage seeds
enum class Stage : std::uint64_t {
  kGraph = 1,
  kTrial = 2,
  kCapture = 3,
  kRecapture = 4,
  kHash = 5,
  kFalseMatch = 6,
  kBootstrap = 7,
};

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

inline std::uint64_t derive_seed(std::uint64_t parent, Stage stage) {
  return derive_seed(parent, static_cast<std::uint64_t>(stage));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace hiddenpop
