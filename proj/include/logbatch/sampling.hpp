#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "logbatch/config.hpp"
#include "logbatch/vectorize.hpp"

namespace logbatch {

/// Logs chosen for one prompt. `indices` point into the candidate list, ascending.
struct Batch {
  std::vector<std::string> logs;
  std::vector<std::size_t> indices;
};

/// Positions of the first occurrence of each distinct string, in order.
std::vector<std::size_t> dedupe(std::span<const std::string> contents);

inline constexpr double kDppDiagonalJitter = 1e-8;
// Greedy selection stops once every remaining candidate's conditional
// variance falls below this, i.e. it is spanned by the items already chosen.
inline constexpr double kDppMinGain = 1e-6;

/// Greedy MAP DPP over the kernel clamp(cos, 0, 1) with unit diagonal.
/// Pads with the first unchosen candidates when diversity runs out.
Batch dpp_sample(std::span<const std::string> candidates, std::span<const LogVector> vectors, std::size_t k,
                 std::uint64_t seed = 0);

/// k-means with ceil(n/k) centroids seeded at evenly spaced candidates;
/// returns the largest group truncated to k.
Batch similarity_sample(std::span<const std::string> candidates, std::span<const LogVector> vectors, std::size_t k,
                        std::uint64_t seed = 0);

/// Uniform without replacement from a seeded generator.
Batch random_sample(std::span<const std::string> candidates, std::size_t k, std::uint64_t seed);

Batch sample(SamplingMethod method, std::span<const std::string> candidates, std::span<const LogVector> vectors,
             std::size_t k, std::uint64_t seed);

}  // namespace logbatch
