#include <gtest/gtest.h>

#include <cmath>

#include "kernclust/model_gen.hpp"

using namespace kernclust;

namespace {

ModelParams params(int k, int p, double alpha, double rho, std::uint64_t seed) {
  ModelParams mp;
  mp.k = k;
  mp.p = p;
  mp.alpha = alpha;
  mp.rho = rho;
  mp.seed = seed;
  return mp;
}

}  // namespace

TEST(ModelParams, SampleCountRounds) {
  EXPECT_EQ(params(2, 100, 1.0, 1, 0).sample_count(), 100);
  EXPECT_EQ(params(2, 300, 2.0, 1, 0).sample_count(), 600);
  EXPECT_EQ(params(3, 10, 0.6, 1, 0).sample_count(), 6);
  EXPECT_EQ(params(3, 10, 0.6, 1, 0).cluster_size(), 2);
}

TEST(ModelParams, ValidateRejectsBadInstances) {
  EXPECT_NO_THROW(params(2, 10, 1.0, 0.0, 0).validate());
  EXPECT_THROW(params(1, 10, 1.0, 1.0, 0).validate(), InvalidParameter);
  EXPECT_THROW(params(2, 0, 1.0, 1.0, 0).validate(), InvalidParameter);
  EXPECT_THROW(params(2, 10, 0.0, 1.0, 0).validate(), InvalidParameter);
  EXPECT_THROW(params(2, 10, 1.0, -1.0, 0).validate(), InvalidParameter);
  EXPECT_THROW(params(2, 7, 1.0, 1.0, 0).validate(), InvalidParameter);   // k does not divide m
  EXPECT_THROW(params(4, 3, 1.0, 1.0, 0).validate(), InvalidParameter);   // m < k
  EXPECT_THROW(params(2, 10, std::nan(""), 1.0, 0).validate(), InvalidParameter);
  EXPECT_THROW(sample_dataset(params(2, 7, 1.0, 1.0, 0)), InvalidParameter);
}

TEST(Partition, ContiguousAndBalance) {
  const Partition p = Partition::contiguous(6, 3);
  EXPECT_EQ(p.labels, (std::vector<int>{0, 0, 1, 1, 2, 2}));
  EXPECT_TRUE(p.is_balanced());
  EXPECT_EQ(p.counts(), (std::vector<int>{2, 2, 2}));

  Partition bad{{0, 0, 0, 1}, 2};
  EXPECT_FALSE(bad.is_balanced());
  EXPECT_THROW(bad.require_balanced(), InvalidInput);
  Partition out_of_range{{0, 2, 0, 1}, 2};
  EXPECT_THROW(out_of_range.require_balanced(), InvalidInput);
}

TEST(Partition, RandomBalancedIsBalanced) {
  Rng rng(3);
  for (int r = 0; r < 50; ++r) {
    const Partition p = Partition::random_balanced(12, 3, rng);
    EXPECT_TRUE(p.is_balanced());
    EXPECT_EQ(p.size(), 12);
  }
}

TEST(Centers, TwoCentersAreAntipodal) {
  Rng rng(5);
  const RowMatrix mu = sample_centers(2, 50, rng);
  EXPECT_LT((mu.row(0) + mu.row(1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Centers, SumToZero) {
  Rng rng(9);
  for (int k : {3, 5, 8}) {
    const int p = 40;
    const RowMatrix mu = sample_centers(k, p, rng);
    EXPECT_LT(mu.colwise().sum().cwiseAbs().maxCoeff(), 1e-10 * p);
  }
}

TEST(Centers, SquaredNormAveragesP) {
  Rng rng(21);
  const int k = 4;
  const int p = 400;
  double total = 0.0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) total += sample_centers(k, p, rng).rowwise().squaredNorm().mean();
  const double mean = total / reps;
  EXPECT_GT(mean, 0.95 * p);
  EXPECT_LT(mean, 1.05 * p);
}

TEST(Dataset, ShapeAndTruth) {
  const Dataset ds = sample_dataset(params(3, 20, 1.5, 2.0, 1));
  EXPECT_EQ(ds.m(), 30);
  EXPECT_EQ(ds.p(), 20);
  EXPECT_EQ(ds.k(), 3);
  EXPECT_EQ(ds.truth, Partition::contiguous(30, 3));
  EXPECT_EQ(ds.centers.rows(), 3);
}

TEST(Dataset, BitIdenticalForSameSeed) {
  const Dataset a = sample_dataset(params(2, 100, 1.0, 5.0, 77));
  const Dataset b = sample_dataset(params(2, 100, 1.0, 5.0, 77));
  EXPECT_TRUE(a.points == b.points);
  EXPECT_TRUE(a.centers == b.centers);
  const Dataset c = sample_dataset(params(2, 100, 1.0, 5.0, 78));
  EXPECT_FALSE(a.points == c.points);
}

TEST(Dataset, ZeroSignalClustersHaveZeroMean) {
  const Dataset ds = sample_dataset(params(2, 200, 2.0, 0.0, 4));
  const int half = ds.m() / 2;
  for (int s = 0; s < 2; ++s) {
    const auto mean = ds.points.middleRows(s * half, half).colwise().mean();
    // E||mean||^2 = p / half; allow four times that.
    EXPECT_LT(mean.squaredNorm(), 4.0 * ds.p() / half);
  }
}

TEST(Dataset, SquaredNormMatchesGaussianMoment) {
  const int p = 400;
  const double rho = 10.0;
  const Dataset ds = sample_dataset(params(2, p, 1.0, rho, 8));
  double observed = 0.0;
  double expected = 0.0;
  for (int i = 0; i < ds.m(); ++i) {
    observed += ds.points.row(i).squaredNorm();
    expected += p + rho * ds.center_of(i).squaredNorm() / p;
  }
  EXPECT_NEAR(observed / expected, 1.0, 0.05);
}

TEST(Dataset, ClusterMeansFollowSignal) {
  const int p = 100;
  const double rho = 50.0;
  const Dataset ds = sample_dataset(params(2, p, 4.0, rho, 12));
  const int half = ds.m() / 2;
  const auto mean = ds.points.topRows(half).colwise().mean();
  const auto target = std::sqrt(rho / p) * ds.centers.row(0);
  EXPECT_LT((mean - target).squaredNorm(), 4.0 * p / half);
}
