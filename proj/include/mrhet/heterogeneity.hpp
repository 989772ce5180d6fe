#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "mrhet/ivw.hpp"
#include "mrhet/stats.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {

enum class WeightKind { FirstOrder, SecondOrder };

// The second-order weight has two renderings in the literature; Delta is the
// delta-method form (theta_j^2 multipliers on the exposure variances) and is
// the default. BetaScaled multiplies the exposure variances by the exposure
// beta itself and adds the raw covariances; it is kept behind this switch for
// comparison and can produce non-positive weights.
enum class SecondOrderVariant { Delta, BetaScaled };

struct WeightScheme {
  WeightKind kind = WeightKind::FirstOrder;
  double tolerance = 1e-8;  // convergence threshold on max |delta theta|
  int max_iterations = 100;
  SecondOrderVariant variant = SecondOrderVariant::Delta;

  static WeightScheme first_order() { return {}; }
  static WeightScheme second_order(double tol = 1e-8, int max_iter = 100,
                                   SecondOrderVariant v = SecondOrderVariant::Delta) {
    return {WeightKind::SecondOrder, tol, max_iter, v};
  }
};

struct HeterogeneityResult {
  double global_q = 0.0;
  int df = 0;             // n - d
  double p_value = 1.0;   // chi2 survival of global_q at df
  std::vector<std::string> snp_ids;
  std::vector<double> local_q;  // aligned with snp_ids
  std::vector<double> weights;  // omega_i actually used
  Eigen::VectorXd theta_used;   // the fit the residuals were computed against
  WeightKind kind = WeightKind::FirstOrder;
  bool converged = true;  // false flags non-convergence of the iterative fit
  int iterations = 0;
  bool covariances_assumed_zero = false;  // second-order run without a covariance file
};

namespace detail {

inline double second_order_weight(const SummaryDataset& data, int i, const Eigen::VectorXd& theta,
                                  SecondOrderVariant variant) {
  const SnpRecord& r = data.record(i);
  const int d = data.n_exposures();
  double w = r.se_outcome * r.se_outcome;
  if (variant == SecondOrderVariant::Delta) {
    for (int j = 0; j < d; ++j) {
      const double sx = r.se_exposure[static_cast<std::size_t>(j)];
      w += theta(j) * theta(j) * sx * sx;
    }
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) w += 2.0 * theta(j) * theta(k) * data.exposure_cov(i, j, k);
  } else {
    for (int j = 0; j < d; ++j) {
      const double sx = r.se_exposure[static_cast<std::size_t>(j)];
      w += r.beta_exposure[static_cast<std::size_t>(j)] * sx * sx;
    }
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (j != k) w += data.exposure_cov(i, j, k);
    if (!(w > 0.0))
      throw NumericalError("NonPositiveWeight",
                           "beta-scaled second-order weight is not positive for snp " + data.record(i).snp_id);
  }
  return w;
}

}  // namespace detail

// Global Cochran's Q and the per-SNP contributions q_i under the requested
// weighting. First-order weights are the outcome variances; second-order
// weights fold in the exposure uncertainty and are iterated to a fixed point
// because they depend on the fitted effects. Non-convergence is reported via
// the result, not an exception.
inline HeterogeneityResult cochran_q(const SummaryDataset& data, const WeightScheme& scheme) {
  if (scheme.kind == WeightKind::SecondOrder) {
    if (!(scheme.tolerance > 0.0)) throw InvalidArgument("WeightScheme tolerance must be > 0");
    if (scheme.max_iterations < 1) throw InvalidArgument("WeightScheme max_iterations must be >= 1");
  }
  const int n = data.n();
  const int d = data.n_exposures();
  const Eigen::MatrixXd X = data.exposure_matrix();
  const Eigen::VectorXd y = data.outcome_betas();
  const Eigen::VectorXd first_order_w = data.outcome_ses().array().square().inverse();

  HeterogeneityResult res;
  res.kind = scheme.kind;
  res.snp_ids = data.snp_ids();
  res.df = n - d;

  Eigen::VectorXd omega(n);  // variance-scale weights; q_i = r_i^2 / omega_i
  if (scheme.kind == WeightKind::FirstOrder) {
    const WlsFit fit = weighted_ls(X, y, first_order_w);
    res.theta_used = fit.coefficients;
    omega = data.outcome_ses().array().square();
    res.iterations = 0;
  } else {
    res.covariances_assumed_zero = !data.has_exposure_cov() && d > 1;
    Eigen::VectorXd theta = weighted_ls(X, y, first_order_w).coefficients;
    bool converged = false;
    int it = 0;
    while (it < scheme.max_iterations) {
      ++it;
      for (int i = 0; i < n; ++i) omega(i) = detail::second_order_weight(data, i, theta, scheme.variant);
      const Eigen::VectorXd next = weighted_ls(X, y, omega.array().inverse()).coefficients;
      const double delta = (next - theta).cwiseAbs().maxCoeff();
      theta = next;
      if (delta < scheme.tolerance) {
        converged = true;
        break;
      }
    }
    res.theta_used = theta;
    res.converged = converged;
    res.iterations = it;
    for (int i = 0; i < n; ++i) omega(i) = detail::second_order_weight(data, i, theta, scheme.variant);
  }

  const Eigen::VectorXd resid = y - X * res.theta_used;
  res.local_q.resize(static_cast<std::size_t>(n));
  res.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    res.weights[static_cast<std::size_t>(i)] = omega(i);
    res.local_q[static_cast<std::size_t>(i)] = resid(i) * resid(i) / omega(i);
  }
  res.global_q = pairwise_sum(res.local_q);
  res.p_value = chi2_sf(res.global_q, static_cast<double>(res.df));
  return res;
}

struct LocalQTest {
  std::vector<double> p_values;  // chi2_1 survival of each q_i
  std::set<std::string> flagged;
  double alpha = 0.05;
  double alpha_star = 0.0;       // alpha / n
  double critical_value = 0.0;   // chi2 quantile at 1 - alpha_star, df 1
};

// Bonferroni-corrected per-SNP outlier test: flag SNP i iff p_i < alpha/n.
inline LocalQTest local_q_pvalues(const HeterogeneityResult& result, double alpha = 0.05) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidP("alpha must be in (0,1)");
  const std::size_t n = result.local_q.size();
  LocalQTest test;
  test.alpha = alpha;
  test.alpha_star = alpha / static_cast<double>(n);
  test.critical_value = chi2_quantile(1.0 - test.alpha_star, 1.0);
  test.p_values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = chi2_sf(result.local_q[i], 1.0);
    test.p_values.push_back(p);
    if (p < test.alpha_star) test.flagged.insert(result.snp_ids[i]);
  }
  return test;
}

}  // namespace mrhet
