#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mrhet/median_mr.hpp"
#include "mrhet/rng.hpp"
#include "testutil.hpp"

using namespace mrhet;
using testutil::make_uni;

TEST(WeightedMedian, EqualWeightsMatchPlainMedian) {
  EXPECT_DOUBLE_EQ(weighted_median({1, 2, 3}, {1, 1, 1}), 2.0);
  EXPECT_DOUBLE_EQ(weighted_median({4, 1, 3, 2}, {1, 1, 1, 1}), 2.5);
}

TEST(WeightedMedian, HandComputedInterpolation) {
  // sorted values (1,2,3), normalized weights (0.2,0.2,0.6)
  // positions: 0.1, 0.3, 0.7 -> interpolate between 2 and 3 at (0.5-0.3)/0.4
  EXPECT_DOUBLE_EQ(weighted_median({1, 2, 3}, {0.2, 0.2, 0.6}), 2.5);
}

TEST(WeightedMedian, Errors) {
  EXPECT_THROW(weighted_median({}, {}), EmptyInput);
  EXPECT_THROW(weighted_median({1, 2}, {1}), InvalidArgument);
  EXPECT_THROW(weighted_median({1, 2}, {0, 0}), InvalidArgument);
  EXPECT_THROW(weighted_median({1, 2}, {-1, 2}), InvalidArgument);
}

TEST(WeightedMedian, ZeroWeightEntriesAreIgnored) {
  EXPECT_DOUBLE_EQ(weighted_median({100, 1, 2, 3}, {0, 1, 1, 1}), 2.0);
  EXPECT_DOUBLE_EQ(weighted_median({5, 7}, {0, 2}), 7.0);
}

TEST(MedianEstimator, RobustToSingleWildRatio) {
  // ratios 1, 2, 100 with equal summary uncertainty
  const auto data = make_uni({1, 1, 1}, {0.05, 0.05, 0.05}, {1, 2, 100}, {0.1, 0.1, 0.1});
  const auto est = median_estimator(data, /*weighted=*/false, 200, 1);
  EXPECT_DOUBLE_EQ(est.theta(0), 2.0);
  EXPECT_EQ(est.method_label, "median-simple");
}

TEST(MedianEstimator, SymmetricRatiosRecoverCenter) {
  const double c = -0.4;
  const auto data = make_uni({1, 1, 1, 1}, {0.05, 0.05, 0.05, 0.05},
                             {c - 2.0, c - 1.0, c + 1.0, c + 2.0}, {0.1, 0.1, 0.1, 0.1});
  const auto est = median_estimator(data, /*weighted=*/false, 200, 1);
  EXPECT_NEAR(est.theta(0), c, 1e-12);
}

TEST(MedianEstimator, BreakdownInvariance) {
  const auto base = make_uni({1, 1, 1, 1, 1}, {0.05, 0.05, 0.05, 0.05, 0.05},
                             {0.8, 1.0, 1.2, 1.4, 9.0}, {0.1, 0.1, 0.1, 0.1, 0.1});
  auto moved_recs = base.records();
  moved_recs[4].beta_outcome = 90.0;  // push the outlier farther out
  const SummaryDataset moved(std::move(moved_recs), 1);
  const auto a = median_estimator(base, false, 100, 2);
  const auto b = median_estimator(moved, false, 100, 2);
  EXPECT_DOUBLE_EQ(a.theta(0), b.theta(0));
}

TEST(MedianEstimator, WeightedPullsTowardPreciseVariants) {
  // the high-weight variant sits at ratio 2; unweighted median sits at 1
  const auto data = make_uni({1, 1, 1}, {0.05, 0.05, 0.05}, {0.5, 1.0, 2.0}, {1.0, 1.0, 0.05});
  const auto weighted = median_estimator(data, true, 200, 3);
  const auto simple = median_estimator(data, false, 200, 3);
  EXPECT_GT(weighted.theta(0), simple.theta(0));
  EXPECT_EQ(weighted.method_label, "median");
}

TEST(MedianEstimator, BootstrapSeIsDeterministicAndSane) {
  Rng rng(71);
  std::vector<double> bx, sx, by, sy;
  const int n = 20;
  for (int i = 0; i < n; ++i) {
    bx.push_back(rng.normal(1.0, 0.3));
    sx.push_back(0.05);
    sy.push_back(0.1);
    by.push_back(0.6 * bx.back() + rng.normal(0.0, sy.back()));
  }
  const auto data = make_uni(bx, sx, by, sy);
  const auto a = median_estimator(data, true, 1000, 9);
  const auto b = median_estimator(data, true, 1000, 9);
  EXPECT_DOUBLE_EQ(a.se(0), b.se(0));
  EXPECT_GT(a.se(0), 0.0);
  EXPECT_LT(a.se(0), 1.0);
  // different seed moves the bootstrap but not the point estimate
  const auto c = median_estimator(data, true, 1000, 10);
  EXPECT_DOUBLE_EQ(a.theta(0), c.theta(0));
  EXPECT_NE(a.se(0), c.se(0));
}

TEST(MedianEstimator, Preconditions) {
  Rng rng(72);
  const auto multi = testutil::random_dataset(rng, 10, 2);
  EXPECT_THROW(median_estimator(multi, true), InvalidArgument);
  const auto two = make_uni({1, 1, 1}, {0.1, 0.1, 0.1}, {1, 1, 1}, {0.1, 0.1, 0.1});
  EXPECT_NO_THROW(median_estimator(two, true, 100, 1));
  auto recs = two.records();
  recs.pop_back();
  EXPECT_THROW(median_estimator(SummaryDataset(std::move(recs), 1), true, 100, 1), TooFewSnps);
}
