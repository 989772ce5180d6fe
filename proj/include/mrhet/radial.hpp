#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mrhet/heterogeneity.hpp"
#include "mrhet/outlier_report.hpp"
#include "mrhet/stats.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {

// One point of the radial (Galbraith) plot: the variant's z-statistic against
// the precision of its ratio estimate.
struct RadialPoint {
  std::string snp_id;
  double z_stat = 0.0;     // ratio estimate / its standard error
  double precision = 0.0;  // inverse standard error of the ratio estimate
  double q = 0.0;
  bool flagged = false;
};

struct RadialResult {
  OutlierReport report;
  std::vector<RadialPoint> points;
  double theta_radial = 0.0;  // slope of the radial regression through the origin
};

// Radial regression of sqrt(w_i) * ratio_i on sqrt(w_i) through the origin.
// With first-order weights the slope is exactly the inverse-variance weighted
// estimate. The modified second-order weights fold the exposure uncertainty
// into the ratio variance using the variant's own ratio estimate,
//   w_i = bx_i^2 / (se_y_i^2 + (by_i/bx_i)^2 se_x_i^2),
// which is what distinguishes radial detection from the global-fit q tests.
// Outliers are the variants whose radial q exceeds the Bonferroni-adjusted
// chi2_1 critical value; the refit is the plain IVW estimate on the pruned
// set.
inline RadialResult radial_mr(const SummaryDataset& data, const WeightScheme& scheme, double alpha = 0.05) {
  require_univariable(data, "radial_mr");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidP("alpha must be in (0,1)");
  const int n = data.n();
  const auto ratios = ratio_estimates(data);

  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& rec = data.record(i);
    if (scheme.kind == WeightKind::FirstOrder) {
      w[static_cast<std::size_t>(i)] = ratios[static_cast<std::size_t>(i)].weight;
    } else {
      const double bx = rec.beta_exposure[0];
      const double ratio = ratios[static_cast<std::size_t>(i)].theta;
      const double var_ratio_num = rec.se_outcome * rec.se_outcome +
                                   ratio * ratio * rec.se_exposure[0] * rec.se_exposure[0];
      w[static_cast<std::size_t>(i)] = bx * bx / var_ratio_num;
    }
  }
  double sum_w = 0.0, sum_wt = 0.0;
  for (int i = 0; i < n; ++i) {
    sum_w += w[static_cast<std::size_t>(i)];
    sum_wt += w[static_cast<std::size_t>(i)] * ratios[static_cast<std::size_t>(i)].theta;
  }

  RadialResult res;
  res.theta_radial = sum_wt / sum_w;
  const double slope = res.theta_radial;

  const double alpha_star = alpha / static_cast<double>(n);
  const double crit = chi2_quantile(1.0 - alpha_star, 1.0);
  res.report.method_label = "radial";
  res.report.threshold_description = "q > " + std::to_string(crit) + " (chi2_1 at alpha/n = " +
                                     std::to_string(alpha_star) + ")";
  res.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double wi = w[static_cast<std::size_t>(i)];
    const double ti = ratios[static_cast<std::size_t>(i)].theta;
    RadialPoint pt;
    pt.snp_id = ratios[static_cast<std::size_t>(i)].snp_id;
    pt.precision = std::sqrt(wi);
    pt.z_stat = ti * pt.precision;
    pt.q = wi * (ti - slope) * (ti - slope);
    const double p = chi2_sf(pt.q, 1.0);
    pt.flagged = p < alpha_star;
    if (pt.flagged) res.report.flagged.insert(pt.snp_id);
    res.report.per_snp_p[pt.snp_id] = p;
    res.report.per_snp_stat[pt.snp_id] = pt.q;
    res.points.push_back(std::move(pt));
  }
  res.report.refit = res.report.flagged.empty() ? ivw_univariable(data)
                                                : ivw_univariable(drop_snps(data, res.report.flagged));
  res.report.refit.method_label = "radial";
  return res;
}

}  // namespace mrhet
