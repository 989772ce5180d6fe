#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "mrhet/gcq.hpp"
#include "mrhet/heterogeneity.hpp"
#include "mrhet/ivw.hpp"
#include "mrhet/median_mr.hpp"
#include "mrhet/presso.hpp"
#include "mrhet/radial.hpp"
#include "mrhet/rng.hpp"
#include "mrhet/summary_data.hpp"

namespace mrhet {

enum class PleiotropyMode { Directional, Balanced };

struct OutlierEffectDist {
  enum class Kind { Uniform, Normal };
  Kind kind = Kind::Uniform;
  double param1 = 0.5;  // Uniform: lower bound; Normal: mean
  double param2 = 1.5;  // Uniform: upper bound; Normal: standard deviation

  double draw(Rng& rng) const {
    return kind == Kind::Uniform ? rng.uniform(param1, param2) : rng.normal(param1, param2);
  }

  std::string describe() const {
    const char* name = kind == Kind::Uniform ? "uniform" : "normal";
    return std::string(name) + "(" + std::to_string(param1) + "," + std::to_string(param2) + ")";
  }
};

// Data-generating process: independent biallelic variants instrument d
// correlated risk factors; a hidden pathway built from the outlier SNPs
// enters the outcome directly and violates the exclusion restriction for
// those variants. Summary statistics come from per-SNP simple regressions.
struct SimConfig {
  int n_individuals = 20000;  // per cohort
  int n_snps = 100;
  int n_exposures = 1;
  double outlier_fraction = 0.0;
  PleiotropyMode pleiotropy_mode = PleiotropyMode::Directional;
  OutlierEffectDist outlier_effect_dist{};
  double r2_first_stage = 0.15;   // variance of each risk factor explained by its variants
  double r2_second_stage = 0.50;  // variance of the outcome explained by risk factors + hidden pathway
  double confounder_r2 = 0.15;    // confounder share of variance in both stages
  std::vector<double> causal_effects{1.0};  // length d
  double pleiotropy_effect = 1.0;           // effect of the hidden pathway on the outcome
  double exposure_error_correlation = 0.5;  // correlation of the first-stage error terms
  double first_stage_coef_mean = 1.0;
  double first_stage_coef_variance = 2.0;
  int n_runs = 200;
  std::uint64_t seed = 0;
  // Exposure and outcome summaries from two independent cohorts (the standard
  // two-sample design). Disable to derive both from one cohort.
  bool two_sample_split = true;

  void validate() const {
    if (n_individuals < 100) throw InvalidArgument("n_individuals must be >= 100");
    if (n_snps < 2) throw InvalidArgument("n_snps must be >= 2");
    if (n_exposures < 1) throw InvalidArgument("n_exposures must be >= 1");
    if (n_snps <= n_exposures) throw InvalidArgument("n_snps must exceed n_exposures");
    if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0))
      throw InvalidArgument("outlier_fraction must be in [0,1]");
    if (!(r2_first_stage > 0.0 && r2_first_stage < 1.0)) throw InvalidArgument("r2_first_stage must be in (0,1)");
    if (!(r2_second_stage > 0.0 && r2_second_stage < 1.0)) throw InvalidArgument("r2_second_stage must be in (0,1)");
    if (!(confounder_r2 >= 0.0 && confounder_r2 < 1.0)) throw InvalidArgument("confounder_r2 must be in [0,1)");
    if (r2_first_stage + confounder_r2 >= 1.0) throw InvalidArgument("first-stage r2 + confounder r2 must be < 1");
    if (r2_second_stage + confounder_r2 >= 1.0) throw InvalidArgument("second-stage r2 + confounder r2 must be < 1");
    if (static_cast<int>(causal_effects.size()) != n_exposures)
      throw InvalidArgument("causal_effects must have one entry per exposure");
    if (!(std::abs(exposure_error_correlation) < 1.0))
      throw InvalidArgument("exposure_error_correlation must be in (-1,1)");
    if (!(first_stage_coef_variance > 0.0)) throw InvalidArgument("first_stage_coef_variance must be > 0");
    if (n_runs < 1) throw InvalidArgument("n_runs must be >= 1");
    if (outlier_effect_dist.kind == OutlierEffectDist::Kind::Uniform &&
        !(outlier_effect_dist.param2 >= outlier_effect_dist.param1))
      throw InvalidArgument("outlier_effect_dist uniform bounds are inverted");
    if (outlier_effect_dist.kind == OutlierEffectDist::Kind::Normal && !(outlier_effect_dist.param2 >= 0.0))
      throw InvalidArgument("outlier_effect_dist normal sd must be >= 0");
  }
};

struct Replicate {
  SummaryDataset data;
  std::set<std::string> true_outliers;
  Eigen::VectorXd true_theta;
};

namespace detail {

struct StructuralParams {
  std::vector<double> maf;
  Eigen::MatrixXd coef;          // n_snps x d first-stage coefficients
  Eigen::VectorXd rho;           // hidden-pathway coefficients (zero for valid SNPs)
  Eigen::VectorXd conf_exposure; // confounder coefficient per exposure
  Eigen::MatrixXd error_chol;    // Cholesky factor of the first-stage error covariance
  double conf_outcome = 0.0;
  double outcome_error_sd = 0.0;
};

// Summary statistics of simple per-SNP regressions of each phenotype column
// on each genotype column.
struct CohortSummaries {
  Eigen::MatrixXd beta;  // n_snps x n_phenotypes
  Eigen::MatrixXd se;    // n_snps x n_phenotypes
};

inline CohortSummaries per_snp_regressions(const Eigen::MatrixXd& G, const Eigen::MatrixXd& pheno) {
  const Eigen::Index N = G.rows();
  const Eigen::Index m = G.cols();
  const Eigen::Index q = pheno.cols();
  const Eigen::VectorXd g_sum = G.colwise().sum();
  const Eigen::VectorXd g_sq = G.array().square().colwise().sum();
  const Eigen::VectorXd p_sum = pheno.colwise().sum();
  const Eigen::VectorXd p_sq = pheno.array().square().colwise().sum();
  const Eigen::MatrixXd cross = G.transpose() * pheno;  // m x q

  CohortSummaries out;
  out.beta.resize(m, q);
  out.se.resize(m, q);
  const double dn = static_cast<double>(N);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sxx = g_sq(i) - g_sum(i) * g_sum(i) / dn;
    if (!(sxx > 0.0)) throw NumericalError("DegenerateGenotype", "monomorphic variant column " + std::to_string(i));
    for (Eigen::Index j = 0; j < q; ++j) {
      const double sxy = cross(i, j) - g_sum(i) * p_sum(j) / dn;
      const double syy = p_sq(j) - p_sum(j) * p_sum(j) / dn;
      const double beta = sxy / sxx;
      const double rss = std::max(0.0, syy - sxy * sxy / sxx);
      out.beta(i, j) = beta;
      out.se(i, j) = std::sqrt(rss / (dn - 2.0) / sxx);
    }
  }
  return out;
}

// Phenotypes for one cohort under the structural model. Column layout:
// exposures 1..d then the outcome. Draw order is fixed: genotypes by SNP,
// confounder, first-stage errors by individual, outcome noise.
inline void simulate_cohort(const SimConfig& cfg, const StructuralParams& sp, Rng& rng, Eigen::MatrixXd& G,
                            Eigen::MatrixXd& pheno) {
  const int N = cfg.n_individuals;
  const int m = cfg.n_snps;
  const int d = cfg.n_exposures;
  G.resize(N, m);
  for (int i = 0; i < m; ++i)
    for (int x = 0; x < N; ++x) G(x, i) = static_cast<double>(rng.binomial(2, sp.maf[static_cast<std::size_t>(i)]));

  Eigen::VectorXd confounder(N);
  for (int x = 0; x < N; ++x) confounder(x) = rng.normal();

  Eigen::MatrixXd errors(N, d);
  for (int x = 0; x < N; ++x)
    for (int j = 0; j < d; ++j) errors(x, j) = rng.normal();
  errors = errors * sp.error_chol.transpose();

  pheno.resize(N, d + 1);
  pheno.leftCols(d) = G * sp.coef + confounder * sp.conf_exposure.transpose() + errors;

  Eigen::VectorXd outcome = pheno.leftCols(d) * Eigen::Map<const Eigen::VectorXd>(cfg.causal_effects.data(), d);
  outcome += cfg.pleiotropy_effect * (G * sp.rho);
  outcome += sp.conf_outcome * confounder;
  for (int x = 0; x < N; ++x) outcome(x) += sp.outcome_error_sd * rng.normal();
  pheno.col(d) = outcome;
}

}  // namespace detail

// One seeded replicate: structural parameters, cohort(s), summary statistics.
// The same (seed, run_index) pair always reproduces the same dataset.
inline Replicate generate_replicate(const SimConfig& cfg, int run_index) {
  cfg.validate();
  const int m = cfg.n_snps;
  const int d = cfg.n_exposures;
  Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(run_index)));

  detail::StructuralParams sp;
  sp.maf.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) sp.maf[static_cast<std::size_t>(i)] = rng.uniform(0.01, 0.5);

  sp.coef.resize(m, d);
  const double coef_sd = std::sqrt(cfg.first_stage_coef_variance);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) sp.coef(i, j) = rng.normal(cfg.first_stage_coef_mean, coef_sd);

  // exactly round(p * m) outliers, drawn without replacement
  const int n_out = static_cast<int>(std::lround(cfg.outlier_fraction * m));
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < n_out; ++i) {
    const int j = i + static_cast<int>(rng.uniform() * static_cast<double>(m - i));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(std::min(j, m - 1))]);
  }
  sp.rho = Eigen::VectorXd::Zero(m);
  std::set<std::string> outlier_ids;
  for (int i = 0; i < n_out; ++i) {
    const int snp = order[static_cast<std::size_t>(i)];
    sp.rho(snp) = cfg.outlier_effect_dist.draw(rng);
    outlier_ids.insert("snp_" + std::to_string(snp + 1));
  }

  // Theoretical variances given the drawn parameters; genetic share of each
  // risk factor is pinned to r2_first_stage by scaling the non-genetic part.
  Eigen::VectorXd var_g(m);
  for (int i = 0; i < m; ++i) {
    const double f = sp.maf[static_cast<std::size_t>(i)];
    var_g(i) = 2.0 * f * (1.0 - f);
  }
  const Eigen::MatrixXd genetic_cov = sp.coef.transpose() * var_g.asDiagonal() * sp.coef;  // d x d
  Eigen::VectorXd total_var(d), error_var(d);
  sp.conf_exposure.resize(d);
  for (int j = 0; j < d; ++j) {
    total_var(j) = genetic_cov(j, j) / cfg.r2_first_stage;
    sp.conf_exposure(j) = std::sqrt(cfg.confounder_r2 * total_var(j));
    error_var(j) = (1.0 - cfg.r2_first_stage - cfg.confounder_r2) * total_var(j);
  }
  Eigen::MatrixXd error_cov(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      error_cov(j, k) = (j == k ? error_var(j)
                                : cfg.exposure_error_correlation * std::sqrt(error_var(j) * error_var(k)));
  Eigen::LLT<Eigen::MatrixXd> llt(error_cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("CovarianceNotPD", "first-stage error covariance is not positive definite");
  sp.error_chol = llt.matrixL();

  Eigen::MatrixXd exposure_cov = genetic_cov + sp.conf_exposure * sp.conf_exposure.transpose() + error_cov;
  const Eigen::VectorXd cov_xh = sp.coef.transpose() * (var_g.asDiagonal() * sp.rho);
  const double var_h = (sp.rho.array().square() * var_g.array()).sum();
  const Eigen::Map<const Eigen::VectorXd> theta(cfg.causal_effects.data(), d);
  double var_signal = theta.dot(exposure_cov * theta) + 2.0 * cfg.pleiotropy_effect * theta.dot(cov_xh) +
                      cfg.pleiotropy_effect * cfg.pleiotropy_effect * var_h;
  // noise-only outcome (theta = 0 and no outliers): fall back to unit scale
  const double total_var_y = var_signal > 0.0 ? var_signal / cfg.r2_second_stage : 1.0;
  sp.conf_outcome = std::sqrt(cfg.confounder_r2 * total_var_y);
  sp.outcome_error_sd = std::sqrt((1.0 - cfg.r2_second_stage - cfg.confounder_r2) * total_var_y +
                                  (var_signal > 0.0 ? 0.0 : cfg.r2_second_stage * total_var_y));

  Eigen::MatrixXd G, pheno;
  detail::simulate_cohort(cfg, sp, rng, G, pheno);
  const detail::CohortSummaries first = detail::per_snp_regressions(G, pheno);
  detail::CohortSummaries outcome_side = first;
  if (cfg.two_sample_split) {
    detail::simulate_cohort(cfg, sp, rng, G, pheno);
    outcome_side = detail::per_snp_regressions(G, pheno);
  }

  std::vector<SnpRecord> records;
  records.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    SnpRecord rec;
    rec.snp_id = "snp_" + std::to_string(i + 1);
    rec.beta_exposure.resize(static_cast<std::size_t>(d));
    rec.se_exposure.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      rec.beta_exposure[static_cast<std::size_t>(j)] = first.beta(i, j);
      rec.se_exposure[static_cast<std::size_t>(j)] = first.se(i, j);
    }
    rec.beta_outcome = outcome_side.beta(i, d);
    rec.se_outcome = outcome_side.se(i, d);
    records.push_back(std::move(rec));
  }
  Eigen::VectorXd true_theta = theta;
  return Replicate{SummaryDataset(std::move(records), d), std::move(outlier_ids), std::move(true_theta)};
}

enum class Method { FullModel, Standard, Sanderson, Presso, Radial, GCQ, Median };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::FullModel: return "full";
    case Method::Standard: return "standard";
    case Method::Sanderson: return "sanderson";
    case Method::Presso: return "presso";
    case Method::Radial: return "radial";
    case Method::GCQ: return "gcq";
    case Method::Median: return "median";
  }
  return "?";
}

inline std::optional<Method> method_from_name(const std::string& name) {
  for (Method m : {Method::FullModel, Method::Standard, Method::Sanderson, Method::Presso, Method::Radial,
                   Method::GCQ, Method::Median})
    if (name == method_name(m)) return m;
  return std::nullopt;
}

struct MethodMetrics {
  bool detector = true;  // false: estimation only (full model, median)
  double sensitivity = std::numeric_limits<double>::quiet_NaN();
  double specificity = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd mean_bias;  // per causal effect
  Eigen::VectorXd mse;        // per causal effect
  double p_bar = std::numeric_limits<double>::quiet_NaN();  // detected / true outlier count
  double a_bar = std::numeric_limits<double>::quiet_NaN();  // detected count
  int n_failed = 0;
  int n_runs_used = 0;
};

using SimMetrics = std::map<Method, MethodMetrics>;

// With the add-one empirical p estimator the smallest attainable p is
// 1/(K+1), so the Bonferroni threshold alpha/n is reachable only when
// K > n/alpha; the default covers the 100-variant presets with margin.
struct BenchmarkOptions {
  int presso_simulations = 4000;
  int median_bootstrap = 500;
  double alpha = 0.05;
};

namespace detail {

struct RunOutcome {
  bool failed = false;
  std::string failure;
  Eigen::VectorXd theta_hat;
  bool is_detector = false;
  int tp = 0, fp = 0, fn = 0, tn = 0;
};

inline RunOutcome score_detector(const std::set<std::string>& flagged, const Replicate& rep,
                                 const CausalEstimate& refit) {
  RunOutcome out;
  out.is_detector = true;
  out.theta_hat = refit.theta;
  for (const auto& id : flagged) {
    if (rep.true_outliers.count(id)) ++out.tp; else ++out.fp;
  }
  out.fn = static_cast<int>(rep.true_outliers.size()) - out.tp;
  out.tn = rep.data.n() - static_cast<int>(rep.true_outliers.size()) - out.fp;
  return out;
}

inline RunOutcome evaluate_method(Method method, const Replicate& rep, const SimConfig& cfg,
                                  const BenchmarkOptions& opt, int run_index) {
  RunOutcome out;
  try {
    switch (method) {
      case Method::FullModel: {
        out.theta_hat = ivw_multivariable(rep.data).theta;
        break;
      }
      case Method::Standard: {
        const auto h = cochran_q(rep.data, WeightScheme::first_order());
        const auto t = local_q_pvalues(h, opt.alpha);
        const auto refit = t.flagged.empty() ? ivw_multivariable(rep.data)
                                             : ivw_multivariable(drop_snps(rep.data, t.flagged));
        out = score_detector(t.flagged, rep, refit);
        break;
      }
      case Method::Sanderson: {
        const auto h = cochran_q(rep.data, WeightScheme::second_order());
        const auto t = local_q_pvalues(h, opt.alpha);
        const auto refit = t.flagged.empty() ? ivw_multivariable(rep.data)
                                             : ivw_multivariable(drop_snps(rep.data, t.flagged));
        out = score_detector(t.flagged, rep, refit);
        break;
      }
      case Method::Presso: {
        PressoConfig pc;
        pc.n_simulations = opt.presso_simulations;
        pc.alpha = opt.alpha;
        pc.seed = Rng::derive(Rng::derive(cfg.seed, static_cast<std::uint64_t>(run_index)), fnv1a64("presso"));
        const auto report = presso_outlier_test(rep.data, pc);
        out = score_detector(report.flagged, rep, report.refit);
        break;
      }
      case Method::Radial: {
        const auto r = radial_mr(rep.data, WeightScheme::second_order(), opt.alpha);
        out = score_detector(r.report.flagged, rep, r.report.refit);
        break;
      }
      case Method::GCQ: {
        GcqOptions go;
        go.alpha = opt.alpha;
        const auto g = detect_outliers_gcq(rep.data, go);
        out = score_detector(g.flagged, rep, g.refit);
        break;
      }
      case Method::Median: {
        const std::uint64_t seed =
            Rng::derive(Rng::derive(cfg.seed, static_cast<std::uint64_t>(run_index)), fnv1a64("median"));
        out.theta_hat = median_estimator(rep.data, /*weighted=*/true, opt.median_bootstrap, seed).theta;
        break;
      }
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.failure = e.what();
  }
  return out;
}

}  // namespace detail

// Benchmarks the requested methods over cfg.n_runs seeded replicates.
// Replicates are independent and may run on several threads; per-replicate
// substreams and an ordered reduction keep the result identical for any
// thread count. Per-replicate failures are excluded from that method's
// averages and surfaced through n_failed, never silently dropped.
inline SimMetrics run_benchmark(const SimConfig& cfg, const std::vector<Method>& methods, int n_threads = 1,
                                const BenchmarkOptions& opt = {}) {
  cfg.validate();
  for (Method m : methods)
    if ((m == Method::Radial || m == Method::Median) && cfg.n_exposures != 1)
      throw InvalidArgument(std::string(method_name(m)) + " requires a single exposure");

  const int z = cfg.n_runs;
  std::vector<std::map<Method, detail::RunOutcome>> outcomes(static_cast<std::size_t>(z));
  const auto worker = [&](int thread_index, int stride) {
    for (int r = thread_index; r < z; r += stride) {
      const Replicate rep = generate_replicate(cfg, r);
      auto& slot = outcomes[static_cast<std::size_t>(r)];
      for (Method m : methods) slot.emplace(m, detail::evaluate_method(m, rep, cfg, opt, r));
    }
  };
  if (n_threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t, n_threads);
    for (auto& th : pool) th.join();
  }

  const int d = cfg.n_exposures;
  SimMetrics metrics;
  for (Method m : methods) {
    MethodMetrics mm;
    mm.detector = !(m == Method::FullModel || m == Method::Median);
    mm.mean_bias = Eigen::VectorXd::Zero(d);
    mm.mse = Eigen::VectorXd::Zero(d);
    double sens_sum = 0.0, spec_sum = 0.0, pbar_sum = 0.0, abar_sum = 0.0;
    int sens_n = 0, spec_n = 0, pbar_n = 0, abar_n = 0, est_n = 0;
    for (int r = 0; r < z; ++r) {
      const auto& out = outcomes[static_cast<std::size_t>(r)].at(m);
      if (out.failed) {
        ++mm.n_failed;
        continue;
      }
      ++est_n;
      const Eigen::Map<const Eigen::VectorXd> truth(cfg.causal_effects.data(), d);
      mm.mean_bias += out.theta_hat - truth;
      mm.mse += (out.theta_hat - truth).array().square().matrix();
      if (out.is_detector) {
        const int true_out = out.tp + out.fn;
        const int true_null = out.tn + out.fp;
        const int detected = out.tp + out.fp;
        if (true_out > 0) {
          sens_sum += static_cast<double>(out.tp) / true_out;
          ++sens_n;
          pbar_sum += static_cast<double>(detected) / true_out;
          ++pbar_n;
        }
        if (true_null > 0) {
          spec_sum += static_cast<double>(out.tn) / true_null;
          ++spec_n;
        }
        abar_sum += detected;
        ++abar_n;
      }
    }
    if (est_n > 0) {
      mm.mean_bias /= static_cast<double>(est_n);
      mm.mse /= static_cast<double>(est_n);
    }
    if (sens_n > 0) mm.sensitivity = sens_sum / sens_n;
    if (spec_n > 0) mm.specificity = spec_sum / spec_n;
    if (pbar_n > 0) mm.p_bar = pbar_sum / pbar_n;
    if (abar_n > 0) mm.a_bar = abar_sum / abar_n;
    mm.n_runs_used = est_n;
    metrics.emplace(m, std::move(mm));
  }
  return metrics;
}

}  // namespace mrhet
