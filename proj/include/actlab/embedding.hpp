#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace actlab {

// Signed-hash bag-of-words text embedder. Deterministic by construction:
// the same (text, config) pair produces bit-identical vectors on every run
// and platform. Output vectors are either all-zero (no tokens) or unit
// L2 norm.
//
// Pipeline, normative for any reimplementation:
//   1. lowercase; tokens are maximal runs of ASCII [a-z0-9]
//   2. h = FNV-1a 64-bit over the token bytes, offset basis XORed with
//      hash_seed
//   3. bucket = h mod dims, sign = -1 if bit 63 of h is set else +1
//   4. accumulate sign into bucket, then L2-normalize
struct EmbedderConfig {
  int dims = 384;
  std::uint64_t hash_seed = 0;
  friend bool operator==(const EmbedderConfig&, const EmbedderConfig&) = default;
};

using EmbeddingVector = std::vector<double>;

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0);

EmbeddingVector embed(std::string_view text, const EmbedderConfig& cfg = {});

// Standard cosine; 0 by convention when either vector is zero.
// Throws DimensionMismatchError on unequal lengths.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace actlab
