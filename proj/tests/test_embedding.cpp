#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "actlab/embedding.hpp"
#include "actlab/errors.hpp"
#include "oracles.hpp"

using namespace actlab;

TEST_CASE("fnv1a64 matches the published test vectors") {
  // Offset basis: hash of the empty string with no seed.
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("fnv1a64 seed xors into the offset basis") {
  CHECK(fnv1a64("", 0xdeadbeefULL) != fnv1a64(""));
  std::mt19937_64 gen(42);
  for (int i = 0; i < 200; ++i) {
    const std::string word = oracle::rand_phrase(gen, 1, 3);
    const std::uint64_t seed = gen();
    CHECK(fnv1a64(word, seed) == oracle::fnv1a64(word, seed));
  }
}

TEST_CASE("tokenization folds case and splits on non-alphanumerics") {
  const EmbedderConfig cfg{64, 0};
  CHECK(embed("Hello, WORLD!", cfg) == embed("hello world", cfg));
  CHECK(embed("push-up  2x\tdone.", cfg) == embed("push up 2x done", cfg));
  // Token order does not matter for a bag of words.
  CHECK(embed("alpha beta", cfg) == embed("beta   alpha", cfg));
}

TEST_CASE("embeddings are unit norm or exactly zero") {
  const EmbedderConfig cfg{384, 0};
  std::mt19937_64 gen(7);
  for (int i = 0; i < 100; ++i) {
    const auto v = embed(oracle::rand_phrase(gen, 1, 6), cfg);
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 == 0.0) {
      // Opposite-sign bucket collisions can cancel a whole bag; the embedder
      // must return the exact zero vector then, never a renormalized one.
      for (double x : v) CHECK(x == 0.0);
    } else {
      CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-12);
    }
  }
  // No tokens at all: the zero vector, not NaN.
  for (const char* text : {"", "   ", "!!! ??? ...", "\t\n"}) {
    const auto z = embed(text, cfg);
    for (double x : z) CHECK(x == 0.0);
  }
}

TEST_CASE("embed is deterministic and dims/seed sensitive") {
  const std::string text = "wrist snap follow through";
  CHECK(embed(text, {384, 0}) == embed(text, {384, 0}));
  CHECK(embed(text, {384, 0}) != embed(text, {384, 1}));
  CHECK(embed(text, {128, 0}).size() == 128u);
}

TEST_CASE("embed rejects degenerate dimensions") {
  CHECK_THROWS_AS(embed("x", {1, 0}), ConfigError);
  CHECK_THROWS_AS(embed("x", {0, 0}), ConfigError);
  CHECK_NOTHROW(embed("x", {2, 0}));
}

TEST_CASE("embed agrees with the reference implementation") {
  std::mt19937_64 gen(11);
  const std::uint64_t seeds[] = {0ULL, 1469598103934665603ULL, gen()};
  for (int dims : {2, 3, 64, 384}) {
    for (std::uint64_t seed : seeds) {
      for (int i = 0; i < 30; ++i) {
        const std::string text = oracle::rand_phrase(gen, 1, 8);
        const auto got = embed(text, {dims, seed});
        const auto want = oracle::embed(text, dims, seed);
        REQUIRE(got.size() == want.size());
        for (size_t k = 0; k < got.size(); ++k) {
          CHECK(std::abs(got[k] - want[k]) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("single token embeds to one signed bucket") {
  // Signs come from bit 63 of the hash, so a lone token is +/-1 in its bucket
  // before normalization and exactly -1 or 1 after.
  const EmbedderConfig cfg{384, 0};
  bool saw_negative = false, saw_positive = false;
  for (const std::string& word : oracle::word_pool()) {
    const std::uint64_t h = oracle::fnv1a64(word, cfg.hash_seed);
    const auto bucket = static_cast<size_t>(h % 384ULL);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    const auto v = embed(word, cfg);
    CHECK(v[bucket] == sign);
    (sign < 0 ? saw_negative : saw_positive) = true;
  }
  CHECK(saw_negative);
  CHECK(saw_positive);
}

TEST_CASE("cosine worked values") {
  CHECK(cosine({1.0, 0.0}, {1.0, 0.0}) == 1.0);
  CHECK(cosine({1.0, 0.0}, {-1.0, 0.0}) == -1.0);
  CHECK(cosine({1.0, 0.0}, {0.0, 1.0}) == 0.0);
  CHECK(cosine({3.0, 4.0}, {6.0, 8.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine({1.0, 1.0}, {1.0, 0.0}) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("cosine conventions and errors") {
  CHECK(cosine({0.0, 0.0}, {1.0, 2.0}) == 0.0);
  CHECK(cosine({0.0, 0.0}, {0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(cosine({1.0, 2.0}, {1.0, 2.0, 3.0}), DimensionMismatchError);
}

TEST_CASE("cosine agrees with the reference on random vectors") {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(16), b(16);
    for (auto& x : a) x = dist(gen);
    for (auto& x : b) x = dist(gen);
    CHECK(cosine(a, b) == doctest::Approx(oracle::cosine(a, b)).epsilon(1e-12));
  }
}
