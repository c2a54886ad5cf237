#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "polygcl/rng.hpp"

using namespace polygcl;

TEST(Rng, SplitMixMatchesReferenceSequence) {
  // Reference outputs of SplitMix64 seeded with 0 (Vigna's splitmix64.c).
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(state), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(splitmix64(state), 0x06c45d188009454fULL);
}

TEST(Rng, DerivedSeedsDifferAcrossSubsystems) {
  std::set<std::uint64_t> seen;
  for (const char* tag : {"model", "augment", "probe", "split", "gradcheck", "view1", "view2"}) {
    EXPECT_TRUE(seen.insert(derive_seed(42, tag)).second) << tag;
  }
  EXPECT_NE(derive_seed(1, "model"), derive_seed(2, "model"));
  EXPECT_EQ(derive_seed(7, "model"), derive_seed(7, "model"));
  EXPECT_NE(derive_seed(7, std::uint64_t{0}), derive_seed(7, std::uint64_t{1}));
}

TEST(Rng, Uniform01StaysInUnitInterval) {
  Rng rng(3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // mean of n uniforms has sd 1/sqrt(12 n)
  EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}

TEST(Rng, UniformIndexCoversRangeEvenly) {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[uniform_index(rng, 7)];
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4.0 * std::sqrt(n / 7.0));
}

TEST(Rng, ShuffleIsAPermutationAndSeeded) {
  std::vector<int> a(50);
  std::iota(a.begin(), a.end(), 0);
  auto b = a;
  Rng r1(5), r2(5);
  shuffle(a, r1);
  shuffle(b, r2);
  EXPECT_EQ(a, b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}
