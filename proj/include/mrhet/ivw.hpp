#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "mrhet/stats.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {

struct CausalEstimate {
  Eigen::VectorXd theta;     // length d
  Eigen::VectorXd se;        // length d
  Eigen::VectorXd p_values;  // two-sided normal approximation
  int n_snps_used = 0;
  std::string method_label;
};

struct RatioEstimate {
  std::string snp_id;
  double theta = 0.0;   // beta_y / beta_x
  double weight = 0.0;  // beta_x^2 / se_y^2, precision of the ratio
};

inline void require_univariable(const SummaryDataset& data, const char* op) {
  if (data.n_exposures() != 1)
    throw InvalidArgument(std::string(op) + " requires a single exposure, got d=" + std::to_string(data.n_exposures()));
}

// Per-variant ratio estimates with first-order inverse-variance weights.
inline std::vector<RatioEstimate> ratio_estimates(const SummaryDataset& data) {
  require_univariable(data, "ratio_estimates");
  std::vector<RatioEstimate> out;
  out.reserve(static_cast<std::size_t>(data.n()));
  for (const auto& r : data.records()) {
    const double bx = r.beta_exposure[0];
    if (bx == 0.0) throw ZeroExposureBeta(r.snp_id);
    const double sy = r.se_outcome;
    out.push_back({r.snp_id, r.beta_outcome / bx, bx * bx / (sy * sy)});
  }
  return out;
}

namespace detail {

inline CausalEstimate estimate_from_fit(const WlsFit& fit, int n_used, std::string label) {
  const Eigen::Index d = fit.coefficients.size();
  CausalEstimate est;
  est.theta = fit.coefficients;
  est.se = fit.covariance.diagonal().array().sqrt();
  est.p_values.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) est.p_values(j) = two_sided_p(est.theta(j) / est.se(j));
  est.n_snps_used = n_used;
  est.method_label = std::move(label);
  return est;
}

}  // namespace detail

// Weighted mean of the ratio estimates; the standard error is (sum w)^{-1/2}.
// Algebraically identical to the multivariable fit at d=1.
inline CausalEstimate ivw_univariable(const SummaryDataset& data) {
  require_univariable(data, "ivw_univariable");
  const auto ratios = ratio_estimates(data);
  double sum_w = 0.0;
  double sum_wt = 0.0;
  for (const auto& r : ratios) {
    sum_w += r.weight;
    sum_wt += r.weight * r.theta;
  }
  CausalEstimate est;
  est.theta.resize(1);
  est.se.resize(1);
  est.p_values.resize(1);
  est.theta(0) = sum_wt / sum_w;
  est.se(0) = 1.0 / std::sqrt(sum_w);
  est.p_values(0) = two_sided_p(est.theta(0) / est.se(0));
  est.n_snps_used = data.n();
  est.method_label = "ivw";
  return est;
}

// Zero-intercept weighted regression of outcome betas on the n x d exposure
// matrix with weights se_y^{-2}.
inline CausalEstimate ivw_multivariable(const SummaryDataset& data) {
  const Eigen::MatrixXd X = data.exposure_matrix();
  const Eigen::VectorXd y = data.outcome_betas();
  const Eigen::VectorXd w = data.outcome_ses().array().square().inverse();
  const WlsFit fit = weighted_ls(X, y, w);
  return detail::estimate_from_fit(fit, data.n(), "ivw");
}

}  // namespace mrhet
