#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "mrhet/outlier_report.hpp"
#include "mrhet/rng.hpp"
#include "mrhet/stats.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {

struct PressoConfig {
  int n_simulations = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  // The reference procedure perturbs exposure betas as well as outcome betas;
  // disable to resample the outcome side only.
  bool perturb_exposures = true;
};

struct PressoGlobalResult {
  double rss_observed = 0.0;
  double p_value = 1.0;  // empirical, add-one estimator
};

namespace detail {

// Leave-one-out coefficient rows via rank-one downdate of the normal
// equations; row i of the result is the fit without SNP i.
inline Eigen::MatrixXd leave_one_out_coefficients(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                                  const Eigen::VectorXd& w) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
  const Eigen::VectorXd b = X.transpose() * (w.array() * y.array()).matrix();
  Eigen::MatrixXd thetas(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = X.row(i).transpose();
    const Eigen::MatrixXd Ai = A - w(i) * xi * xi.transpose();
    const Eigen::VectorXd bi = b - w(i) * y(i) * xi;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Ai);
    if (!lu.isInvertible())
      throw RankDeficient("leave-one-out fit is rank deficient when dropping row " + std::to_string(i));
    thetas.row(i) = lu.solve(bi).transpose();
  }
  return thetas;
}

struct PressoRun {
  double rss_observed = 0.0;
  std::vector<double> contributions_observed;
  double global_p = 1.0;
  std::vector<double> per_snp_p;
};

inline PressoRun run_presso(const SummaryDataset& data, const PressoConfig& cfg) {
  if (cfg.n_simulations < 100) throw InvalidArgument("PressoConfig.n_simulations must be >= 100");
  const int n = data.n();
  const int d = data.n_exposures();
  if (n <= d + 1) throw TooFewSnps("leave-one-out needs n > d + 1");

  const Eigen::MatrixXd X = data.exposure_matrix();
  const Eigen::VectorXd y = data.outcome_betas();
  const Eigen::VectorXd sy = data.outcome_ses();
  const Eigen::VectorXd w = sy.array().square().inverse();

  const Eigen::MatrixXd theta_loo = leave_one_out_coefficients(X, y, w);
  Eigen::VectorXd mu(n);  // expected outcome beta under each leave-one-out fit
  for (int i = 0; i < n; ++i) mu(i) = theta_loo.row(i).dot(X.row(i));

  PressoRun run;
  run.contributions_observed.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = y(i) - mu(i);
    run.contributions_observed[static_cast<std::size_t>(i)] = w(i) * r * r;
  }
  run.rss_observed = pairwise_sum(run.contributions_observed);

  // One substream per SNP, keyed by id so the flag set does not depend on row
  // order. Draw order per replicate: outcome beta first, then each exposure.
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(n));
  for (const auto& rec : data.records()) streams.emplace_back(Rng::derive(cfg.seed, fnv1a64(rec.snp_id)));

  Eigen::MatrixXd Xs = X;
  Eigen::VectorXd ys(n);
  std::vector<double> contrib(static_cast<std::size_t>(n));
  long global_count = 0;
  std::vector<long> snp_counts(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < cfg.n_simulations; ++k) {
    for (int i = 0; i < n; ++i) {
      Rng& rng = streams[static_cast<std::size_t>(i)];
      ys(i) = mu(i) + sy(i) * rng.normal();
      if (cfg.perturb_exposures) {
        const auto& rec = data.record(i);
        for (int j = 0; j < d; ++j)
          Xs(i, j) = rec.beta_exposure[static_cast<std::size_t>(j)] +
                     rec.se_exposure[static_cast<std::size_t>(j)] * rng.normal();
      }
    }
    const Eigen::MatrixXd theta_sim = leave_one_out_coefficients(Xs, ys, w);
    for (int i = 0; i < n; ++i) {
      const double r = ys(i) - theta_sim.row(i).dot(Xs.row(i));
      contrib[static_cast<std::size_t>(i)] = w(i) * r * r;
      if (contrib[static_cast<std::size_t>(i)] >= run.contributions_observed[static_cast<std::size_t>(i)])
        ++snp_counts[static_cast<std::size_t>(i)];
    }
    if (pairwise_sum(contrib) >= run.rss_observed) ++global_count;
  }

  const double denom = 1.0 + cfg.n_simulations;
  run.global_p = (1.0 + static_cast<double>(global_count)) / denom;
  run.per_snp_p.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    run.per_snp_p[static_cast<std::size_t>(i)] = (1.0 + static_cast<double>(snp_counts[static_cast<std::size_t>(i)])) / denom;
  return run;
}

}  // namespace detail

// Global heterogeneity test: observed leave-one-out residual sum of squares
// against its simulated null distribution.
inline PressoGlobalResult presso_global(const SummaryDataset& data, const PressoConfig& cfg) {
  const auto run = detail::run_presso(data, cfg);
  return {run.rss_observed, run.global_p};
}

// Per-SNP outlier test: each observed contribution is compared with its own
// simulated null contributions; flag when the Bonferroni-adjusted empirical
// p-value falls below alpha/n.
inline OutlierReport presso_outlier_test(const SummaryDataset& data, const PressoConfig& cfg) {
  const auto run = detail::run_presso(data, cfg);
  const int n = data.n();
  OutlierReport report;
  report.method_label = "presso";
  const double alpha_star = cfg.alpha / static_cast<double>(n);
  report.threshold_description = "empirical p < " + std::to_string(alpha_star) + " (alpha/n, add-one estimator, " +
                                 std::to_string(cfg.n_simulations) + " simulations)";
  for (int i = 0; i < n; ++i) {
    const std::string& id = data.record(i).snp_id;
    report.per_snp_p[id] = run.per_snp_p[static_cast<std::size_t>(i)];
    report.per_snp_stat[id] = run.contributions_observed[static_cast<std::size_t>(i)];
    if (run.per_snp_p[static_cast<std::size_t>(i)] < alpha_star) report.flagged.insert(id);
  }
  report.refit = report.flagged.empty() ? ivw_multivariable(data) : ivw_multivariable(drop_snps(data, report.flagged));
  report.refit.method_label = "presso";
  return report;
}

}  // namespace mrhet
