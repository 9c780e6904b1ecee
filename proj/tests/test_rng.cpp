#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "plandial/rng.hpp"

using plandial::SplitMix64;

TEST(Rng, MatchesReferenceStreamForSeedZero) {
  SplitMix64 r(0);
  EXPECT_EQ(r.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(r.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(r.next(), 0x06c45d188009454fULL);
}

TEST(Rng, SameSeedSameStream) {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, UniformInUnitInterval) {
  SplitMix64 r(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowCoversRangeAndRejectsZero) {
  SplitMix64 r(5);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_THROW(r.below(0), std::invalid_argument);
}

TEST(Rng, WeightedNeverReturnsZeroWeight) {
  SplitMix64 r(9);
  const std::vector<double> w = {0.0, 1.0, 0.0, 3.0, 0.0};
  std::vector<int> hits(w.size(), 0);
  for (int i = 0; i < 20000; ++i) ++hits[r.weighted(w)];
  EXPECT_EQ(hits[0] + hits[2] + hits[4], 0);
  EXPECT_NEAR(hits[3] / 20000.0, 0.75, 0.02);
  const std::vector<double> none = {0.0, 0.0};
  EXPECT_THROW(r.weighted(none), std::invalid_argument);
}

TEST(Rng, DerivedStreamsDiffer) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(plandial::derive_seed(7, i));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_EQ(plandial::derive_seed(7, 3), plandial::derive_seed(7, 3));
  EXPECT_NE(plandial::derive_seed(7, 3), plandial::derive_seed(8, 3));
}
