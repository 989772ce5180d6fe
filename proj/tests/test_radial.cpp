#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mrhet/heterogeneity.hpp"
#include "mrhet/ivw.hpp"
#include "mrhet/radial.hpp"
#include "mrhet/rng.hpp"
#include "testutil.hpp"

using namespace mrhet;
using testutil::make_uni;

TEST(RadialMr, FirstOrderSlopeEqualsIvw) {
  Rng rng(61);
  for (int k = 0; k < 100; ++k) {
    const int n = 5 + static_cast<int>(rng.uniform() * 20.0);
    const auto data = testutil::random_linked_dataset(rng, n, 1);
    const auto r = radial_mr(data, WeightScheme::first_order());
    const auto ivw = ivw_univariable(data);
    ASSERT_NEAR(r.theta_radial, ivw.theta(0), 1e-12 * std::max(1.0, std::abs(ivw.theta(0))));
  }
}

TEST(RadialMr, HomogeneousRatiosNothingFlagged) {
  const double c = 1.3;
  const auto data = make_uni({1.0, 2.0, 0.5, 1.5}, {0.05, 0.05, 0.05, 0.05},
                             {c * 1.0, c * 2.0, c * 0.5, c * 1.5}, {0.2, 0.3, 0.15, 0.25});
  const auto r = radial_mr(data, WeightScheme::first_order());
  EXPECT_NEAR(r.theta_radial, c, 1e-12);
  EXPECT_TRUE(r.report.flagged.empty());
  for (const auto& pt : r.points) EXPECT_NEAR(pt.q, 0.0, 1e-18);
}

TEST(RadialMr, SecondOrderWeightsUseTheVariantRatio) {
  // independent closed-form route: w_i = bx^2 / (sy^2 + ratio_i^2 sx^2),
  // slope = sum(w * ratio) / sum(w), q_i = w_i (ratio_i - slope)^2
  Rng rng(62);
  for (int k = 0; k < 20; ++k) {
    const auto data = testutil::random_linked_dataset(rng, 15, 1);
    const auto r = radial_mr(data, WeightScheme::second_order());
    double sw = 0.0, swt = 0.0;
    std::vector<double> w(15), ratio(15);
    for (int i = 0; i < 15; ++i) {
      const auto& rec = data.record(i);
      ratio[i] = rec.beta_outcome / rec.beta_exposure[0];
      w[i] = rec.beta_exposure[0] * rec.beta_exposure[0] /
             (rec.se_outcome * rec.se_outcome + ratio[i] * ratio[i] * rec.se_exposure[0] * rec.se_exposure[0]);
      sw += w[i];
      swt += w[i] * ratio[i];
    }
    const double slope = swt / sw;
    ASSERT_NEAR(r.theta_radial, slope, 1e-12 * std::max(1.0, std::abs(slope)));
    for (int i = 0; i < 15; ++i) {
      const double q = w[i] * (ratio[i] - slope) * (ratio[i] - slope);
      ASSERT_NEAR(r.points[static_cast<std::size_t>(i)].q, q, 1e-10 * std::max(1.0, q));
    }
  }
}

TEST(RadialMr, SecondOrderDiffersFromGlobalFitQ) {
  // with real exposure uncertainty the per-variant weights separate radial
  // detection from the iterated second-order local q test
  Rng rng(66);
  auto recs = testutil::random_linked_dataset(rng, 15, 1).records();
  for (auto& rec : recs) rec.se_exposure[0] = 0.3;
  const SummaryDataset data(std::move(recs), 1);
  const auto r = radial_mr(data, WeightScheme::second_order());
  const auto h = cochran_q(data, WeightScheme::second_order());
  double max_rel = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double a = r.points[static_cast<std::size_t>(i)].q;
    const double b = h.local_q[static_cast<std::size_t>(i)];
    max_rel = std::max(max_rel, std::abs(a - b) / std::max(1e-12, std::max(a, b)));
  }
  EXPECT_GT(max_rel, 0.01);
}

TEST(RadialMr, PointsEncodeZAndPrecision) {
  Rng rng(63);
  const auto data = testutil::random_linked_dataset(rng, 10, 1);
  const auto ratios = ratio_estimates(data);
  const auto r = radial_mr(data, WeightScheme::first_order());
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.points[i].z_stat / r.points[i].precision, ratios[i].theta);
    EXPECT_NEAR(r.points[i].precision, std::sqrt(ratios[i].weight), 1e-12);
  }
}

TEST(RadialMr, InjectedOutlierFlaggedAndRefitViaIvw) {
  // moderate outlier: big enough to flag, small enough not to drag the fit
  Rng rng(64);
  std::vector<double> bx, sx, by, sy;
  for (int i = 0; i < 20; ++i) {
    bx.push_back(rng.normal(1.2, 0.2));
    sx.push_back(0.01);
    sy.push_back(0.1);
    by.push_back(0.4 * bx.back() + rng.normal(0.0, sy.back()));
  }
  by[5] += 1.5;
  const auto data = make_uni(bx, sx, by, sy);
  const auto r = radial_mr(data, WeightScheme::second_order());
  EXPECT_EQ(r.report.flagged, std::set<std::string>{"snp_6"});
  const auto pruned = ivw_univariable(drop_snps(data, r.report.flagged));
  EXPECT_DOUBLE_EQ(r.report.refit.theta(0), pruned.theta(0));
}

TEST(RadialMr, ErrorsOnBadInput) {
  Rng rng(65);
  const auto multi = testutil::random_dataset(rng, 10, 2);
  EXPECT_THROW(radial_mr(multi, WeightScheme::first_order()), InvalidArgument);
  const auto zero = make_uni({1.0, 0.0, 2.0, 1.0}, {0.1, 0.1, 0.1, 0.1}, {1, 1, 1, 1}, {0.2, 0.2, 0.2, 0.2});
  EXPECT_THROW(radial_mr(zero, WeightScheme::first_order()), ZeroExposureBeta);
}
