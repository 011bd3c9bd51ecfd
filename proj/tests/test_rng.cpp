#include <gtest/gtest.h>

#include <set>

#include "kernclust/rng.hpp"

using namespace kernclust;

TEST(Rng, DeriveSeedIsDeterministic) {
  EXPECT_EQ(derive_seed(7, {1, 2, 3}), derive_seed(7, {1, 2, 3}));
  EXPECT_EQ(make_rng(7, {4})(), make_rng(7, {4})());
}

TEST(Rng, PathsGiveDistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(11, {a, b}));
  }
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_NE(derive_seed(1, {0, 1}), derive_seed(1, {1, 0}));
  EXPECT_NE(derive_seed(1, {0}), derive_seed(1, {0, 0}));
  EXPECT_NE(derive_seed(1, {}), derive_seed(2, {}));
}

TEST(Rng, Mix64KnownValue) {
  // First SplitMix64 output from state 0.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}
