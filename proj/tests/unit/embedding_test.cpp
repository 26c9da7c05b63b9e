#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "logkg/embedding.hpp"
#include "logkg/errors.hpp"
#include "oracles.hpp"

namespace logkg {
namespace {

TEST(CosineSim, Examples) {
  const Embedding a{{1.0, 0.0}};
  const Embedding b{{0.0, 2.0}};
  const Embedding c{{3.0, 0.0}};
  EXPECT_DOUBLE_EQ(cosine_sim(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_sim(a, c), 1.0);
  EXPECT_DOUBLE_EQ(cosine_sim(a, Embedding{{-1.0, 0.0}}), -1.0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, b), 1.0);
}

TEST(CosineSim, Errors) {
  EXPECT_THROW(cosine_sim(Embedding{{1.0}}, Embedding{{1.0, 0.0}}), DimensionMismatch);
  EXPECT_THROW(cosine_sim(Embedding{{0.0, 0.0}}, Embedding{{1.0, 0.0}}), ZeroVector);
  Embedding z{{0.0}};
  EXPECT_THROW(normalize_in_place(z), ZeroVector);
}

// Property: symmetric, bounded, matches an unclamped textbook formula.
TEST(CosineSimProperty, MatchesNaiveFormula) {
  testing::Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t dim = testing::uniform(rng, 1, 16);
    const auto a = testing::random_unit_vector(rng, dim);
    const auto b = testing::random_unit_vector(rng, dim);
    const double s = cosine_sim(a, b);
    ASSERT_DOUBLE_EQ(s, cosine_sim(b, a));
    ASSERT_GE(s, -1.0);
    ASSERT_LE(s, 1.0);
    ASSERT_NEAR(s, testing::naive_cosine(a, b), 1e-12);
    ASSERT_NEAR(cosine_sim(a, a), 1.0, 1e-12);
  }
}

TEST(Tokenize, LowercasesAsciiRuns) {
  EXPECT_EQ(tokenize("Failed password for ROOT from 10.0.0.1"),
            (std::vector<std::string>{"failed", "password", "for", "root", "from", "10", "0", "0", "1"}));
  EXPECT_EQ(tokenize("caf\xc3\xa9-bar"), (std::vector<std::string>{"caf\xc3\xa9", "bar"}));
  EXPECT_TRUE(tokenize("--- ::").empty());
}

TEST(HashingEmbedder, UnitLengthAndDeterministic) {
  const HashingEmbedder e(64);
  const auto v = e.embed("sshd: Accepted password for root");
  EXPECT_EQ(v.dim(), 64u);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  EXPECT_EQ(v, e.embed("sshd: Accepted password for root"));
  EXPECT_EQ(e.name(), "hashing-64");
}

TEST(HashingEmbedder, CaseAndPunctuationInsensitive) {
  const HashingEmbedder e;
  EXPECT_EQ(e.embed("Disk FULL on /var"), e.embed("disk full on var"));
  EXPECT_GT(cosine_sim(e.embed("disk full on var"), e.embed("disk full on tmp")),
            cosine_sim(e.embed("disk full on var"), e.embed("user login accepted")));
}

TEST(HashingEmbedder, PunctuationOnlyTextStillEmbeds) {
  const HashingEmbedder e(32);
  EXPECT_NEAR(e.embed("---").norm(), 1.0, 1e-12);
}

TEST(HashingEmbedder, RejectsBlankTextAndZeroDimension) {
  const HashingEmbedder e;
  EXPECT_THROW(e.embed("   "), EmptyInput);
  EXPECT_THROW(HashingEmbedder(0), ConfigError);
}

TEST(HashingEmbedder, BucketIsFnv1a) {
  const HashingEmbedder e(1000);
  // FNV-1a 64 of "a" is 0xaf63dc4c8601ec8c.
  EXPECT_EQ(e.bucket("a"), static_cast<std::size_t>(0xaf63dc4c8601ec8cULL % 1000));
}

}  // namespace
}  // namespace logkg
