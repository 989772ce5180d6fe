#pragma once

#include <Eigen/Dense>

#include <limits>
#include <set>
#include <string>
#include <vector>

#include "mrhet/heterogeneity.hpp"
#include "mrhet/ivw.hpp"
#include "mrhet/stats.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {

// Genomic-control calibration of the first-order local q-statistics: the
// inflation factor is the q median divided by 0.455625 (= 0.675^2, the
// conventional chi2_1 median constant used by genomic control).
inline constexpr double kChi2MedianConstant = 0.455625;

inline double estimate_lambda(const std::vector<double>& local_q, bool floor_at_one = false) {
  if (local_q.empty()) throw EmptyInput("estimate_lambda needs at least one q value");
  const double lambda = median(local_q) / kChi2MedianConstant;
  return floor_at_one && lambda < 1.0 ? 1.0 : lambda;
}

struct GcqOptions {
  double alpha = 0.05;
  bool floor_lambda_at_one = false;  // off by default; deflation is reported, not hidden
  bool iterate = false;              // single-pass detection by default
};

struct GcqResult {
  double lambda_hat = 0.0;
  std::vector<std::string> snp_ids;
  std::vector<double> local_q;     // first-order q_i
  std::vector<double> adjusted_q;  // q_i / lambda_hat
  std::vector<double> p_values;    // chi2_1 survival of adjusted_q
  std::set<std::string> flagged;
  double alpha = 0.05;
  double alpha_star = 0.0;       // alpha / n
  double critical_value = 0.0;   // chi2_1 quantile at 1 - alpha_star
  CausalEstimate refit;          // after dropping flagged SNPs (full model if none)
  Eigen::VectorXd theta_used;
  bool degenerate_lambda = false;  // lambda below machine epsilon: exact-fit data
};

// Estimate lambda once from the full instrument set, rescale the local
// q-statistics, flag everything above the Bonferroni-adjusted chi2_1 critical
// value and refit without the flagged SNPs. With iterate=true the whole
// procedure is re-applied to the pruned set until no new SNP is flagged; the
// reported lambda, q values and thresholds are always those of the first pass.
inline GcqResult detect_outliers_gcq(const SummaryDataset& data, const GcqOptions& options = {}) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw InvalidP("alpha must be in (0,1)");
  const HeterogeneityResult base = cochran_q(data, WeightScheme::first_order());
  GcqResult res;
  res.snp_ids = base.snp_ids;
  res.local_q = base.local_q;
  res.theta_used = base.theta_used;
  res.alpha = options.alpha;
  res.alpha_star = options.alpha / static_cast<double>(data.n());
  res.critical_value = chi2_quantile(1.0 - res.alpha_star, 1.0);
  res.lambda_hat = estimate_lambda(base.local_q, options.floor_lambda_at_one);

  if (res.lambda_hat <= std::numeric_limits<double>::epsilon()) {
    // Exactly-fitting dataset; rescaling is undefined, keep every instrument.
    res.degenerate_lambda = true;
    res.adjusted_q = res.local_q;
    res.p_values.reserve(res.local_q.size());
    for (double q : res.local_q) res.p_values.push_back(chi2_sf(q, 1.0));
    res.refit = ivw_multivariable(data);
    res.refit.method_label = "gcq";
    return res;
  }

  res.adjusted_q.reserve(res.local_q.size());
  res.p_values.reserve(res.local_q.size());
  for (std::size_t i = 0; i < res.local_q.size(); ++i) {
    const double adj = res.local_q[i] / res.lambda_hat;
    res.adjusted_q.push_back(adj);
    res.p_values.push_back(chi2_sf(adj, 1.0));
    if (adj > res.critical_value) res.flagged.insert(res.snp_ids[i]);
  }

  if (options.iterate && !res.flagged.empty()) {
    std::set<std::string> all = res.flagged;
    while (true) {
      if (data.n() - static_cast<int>(all.size()) <= data.n_exposures() + 1) break;
      const SummaryDataset pruned = drop_snps(data, all);
      const HeterogeneityResult h = cochran_q(pruned, WeightScheme::first_order());
      const double lam = estimate_lambda(h.local_q, options.floor_lambda_at_one);
      if (lam <= std::numeric_limits<double>::epsilon()) break;
      const double crit = chi2_quantile(1.0 - options.alpha / static_cast<double>(pruned.n()), 1.0);
      std::set<std::string> fresh;
      for (std::size_t i = 0; i < h.local_q.size(); ++i)
        if (h.local_q[i] / lam > crit) fresh.insert(h.snp_ids[i]);
      if (fresh.empty()) break;
      all.insert(fresh.begin(), fresh.end());
    }
    res.flagged = all;
  }

  res.refit = res.flagged.empty() ? ivw_multivariable(data) : ivw_multivariable(drop_snps(data, res.flagged));
  res.refit.method_label = "gcq";
  return res;
}

}  // namespace mrhet
