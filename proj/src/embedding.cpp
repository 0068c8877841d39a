#include "actlab/embedding.hpp"

#include <cmath>

#include "actlab/errors.hpp"

namespace actlab {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline bool is_token_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

inline char fold(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ seed;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

EmbeddingVector embed(std::string_view text, const EmbedderConfig& cfg) {
  if (cfg.dims < 2) throw ConfigError("embedder dims must be >= 2");
  EmbeddingVector acc(static_cast<std::size_t>(cfg.dims), 0.0);

  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = fnv1a64(token, cfg.hash_seed);
    const auto bucket =
        static_cast<std::size_t>(h % static_cast<std::uint64_t>(cfg.dims));
    acc[bucket] += (h >> 63) ? -1.0 : 1.0;
    token.clear();
  };

  for (char c : text) {
    if (is_token_char(c)) {
      token.push_back(fold(c));
    } else {
      flush();
    }
  }
  flush();

  double norm2 = 0.0;
  for (double v : acc) norm2 += v * v;
  if (norm2 == 0.0) return acc;  // no tokens, or signs cancelled exactly
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : acc) v *= inv;
  return acc;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatchError("cosine: vectors have different dimensions");
  }
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na2 += a[i] * a[i];
    nb2 += b[i] * b[i];
  }
  if (na2 == 0.0 || nb2 == 0.0) return 0.0;
  return dot / (std::sqrt(na2) * std::sqrt(nb2));
}

}  // namespace actlab
