#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "mrhet/ivw.hpp"
#include "mrhet/rng.hpp"
#include "mrhet/stats.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {

// Interpolated weighted median: weights are normalized to sum one and the
// estimate is the value at cumulative weight 0.5, interpolating linearly
// between the order statistics at positions (cum_i - w_i/2). Equal weights
// reproduce the plain midpoint median.
inline double weighted_median(std::vector<double> values, std::vector<double> weights) {
  if (values.empty()) throw EmptyInput("weighted_median of empty vector");
  if (values.size() != weights.size()) throw InvalidArgument("weighted_median: size mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("weighted_median: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("weighted_median: weights sum to zero");
  // zero-weight entries carry no mass and would break the interpolation grid
  std::size_t kept = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] > 0.0) {
      values[kept] = values[i];
      weights[kept] = weights[i];
      ++kept;
    }
  }
  values.resize(kept);
  weights.resize(kept);
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> pos(n);
  double cum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double w = weights[idx[r]] / total;
    pos[r] = cum + 0.5 * w;
    cum += w;
  }
  if (0.5 <= pos.front()) return values[idx.front()];
  if (0.5 >= pos.back()) return values[idx.back()];
  std::size_t j = 0;
  while (pos[j + 1] < 0.5) ++j;
  const double v0 = values[idx[j]], v1 = values[idx[j + 1]];
  return v0 + (v1 - v0) * (0.5 - pos[j]) / (pos[j + 1] - pos[j]);
}

// Median-based estimator over the per-variant ratio estimates; weighted mode
// uses the first-order inverse-variance weights. The standard error comes
// from a seeded parametric bootstrap that resamples the summary betas from
// their reported standard errors.
inline CausalEstimate median_estimator(const SummaryDataset& data, bool weighted, int n_bootstrap = 1000,
                                       std::uint64_t seed = 0) {
  require_univariable(data, "median_estimator");
  if (data.n() < 3) throw TooFewSnps("median_estimator needs n >= 3");
  if (n_bootstrap < 2) throw InvalidArgument("n_bootstrap must be >= 2");
  const int n = data.n();

  const auto point = [&](const std::vector<double>& bx, const std::vector<double>& by) {
    std::vector<double> ratio(static_cast<std::size_t>(n)), wt(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double sy = data.record(i).se_outcome;
      ratio[static_cast<std::size_t>(i)] = by[static_cast<std::size_t>(i)] / bx[static_cast<std::size_t>(i)];
      wt[static_cast<std::size_t>(i)] =
          weighted ? bx[static_cast<std::size_t>(i)] * bx[static_cast<std::size_t>(i)] / (sy * sy) : 1.0;
    }
    return weighted_median(std::move(ratio), std::move(wt));
  };

  std::vector<double> bx(static_cast<std::size_t>(n)), by(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& r = data.record(i);
    if (r.beta_exposure[0] == 0.0) throw ZeroExposureBeta(r.snp_id);
    bx[static_cast<std::size_t>(i)] = r.beta_exposure[0];
    by[static_cast<std::size_t>(i)] = r.beta_outcome;
  }
  const double estimate = point(bx, by);

  Rng rng(Rng::derive(seed, fnv1a64("median-bootstrap")));
  std::vector<double> boots;
  boots.reserve(static_cast<std::size_t>(n_bootstrap));
  std::vector<double> bxs(static_cast<std::size_t>(n)), bys(static_cast<std::size_t>(n));
  for (int b = 0; b < n_bootstrap; ++b) {
    for (int i = 0; i < n; ++i) {
      const auto& r = data.record(i);
      bxs[static_cast<std::size_t>(i)] = r.beta_exposure[0] + r.se_exposure[0] * rng.normal();
      bys[static_cast<std::size_t>(i)] = r.beta_outcome + r.se_outcome * rng.normal();
    }
    boots.push_back(point(bxs, bys));
  }
  double mean = 0.0;
  for (double v : boots) mean += v;
  mean /= static_cast<double>(n_bootstrap);
  double ss = 0.0;
  for (double v : boots) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / static_cast<double>(n_bootstrap - 1));

  CausalEstimate est;
  est.theta.resize(1);
  est.se.resize(1);
  est.p_values.resize(1);
  est.theta(0) = estimate;
  est.se(0) = se;
  est.p_values(0) = two_sided_p(estimate / se);
  est.n_snps_used = n;
  est.method_label = weighted ? "median" : "median-simple";
  return est;
}

}  // namespace mrhet
