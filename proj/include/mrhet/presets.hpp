#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrhet/simulation.hpp"

namespace mrhet {

// Desk-scale benchmark settings: 20,000 individuals per cohort and 200 runs,
// which keeps every preset under a minute on one core. The univariable causal
// effect and the directional outlier-effect distribution are calibrated (see
// README) so that the full-model bias ladder and the first-order
// overdispersion regime survive the reduced cohort size.
inline constexpr double kUnivariableCausalEffect = 0.2;

inline OutlierEffectDist directional_effect_dist() {
  return {OutlierEffectDist::Kind::Uniform, 1.8, 3.5};
}

inline OutlierEffectDist strong_effect_dist() {
  return {OutlierEffectDist::Kind::Uniform, 7.2, 14.0};
}

inline OutlierEffectDist balanced_effect_dist() {
  return {OutlierEffectDist::Kind::Normal, 0.0, 1.0};
}

inline std::vector<std::string> preset_names() {
  return {"uni5",  "uni10",  "uni15",  "uni20",  "uni-strong", "uni-balanced",
          "multi5", "multi10", "multi15", "multi20", "uni50",     "uni80"};
}

inline std::optional<SimConfig> preset_config(const std::string& name) {
  SimConfig cfg;
  cfg.n_individuals = 20000;
  cfg.n_snps = 100;
  cfg.n_runs = 200;
  cfg.two_sample_split = true;
  cfg.pleiotropy_mode = PleiotropyMode::Directional;
  cfg.outlier_effect_dist = directional_effect_dist();
  cfg.n_exposures = 1;
  cfg.causal_effects = {kUnivariableCausalEffect};

  const auto uni = [&](double p) {
    cfg.outlier_fraction = p;
    return cfg;
  };
  const auto multi = [&](double p) {
    cfg.n_exposures = 3;
    cfg.causal_effects = {0.0, 1.0, -0.5};
    cfg.outlier_fraction = p;
    return cfg;
  };

  if (name == "uni5") return uni(0.05);
  if (name == "uni10") return uni(0.10);
  if (name == "uni15") return uni(0.15);
  if (name == "uni20") return uni(0.20);
  if (name == "uni50") return uni(0.50);
  if (name == "uni80") return uni(0.80);
  if (name == "uni-strong") {
    cfg.outlier_effect_dist = strong_effect_dist();
    return uni(0.15);
  }
  if (name == "uni-balanced") {
    cfg.pleiotropy_mode = PleiotropyMode::Balanced;
    cfg.outlier_effect_dist = balanced_effect_dist();
    return uni(0.20);
  }
  if (name == "multi5") return multi(0.05);
  if (name == "multi10") return multi(0.10);
  if (name == "multi15") return multi(0.15);
  if (name == "multi20") return multi(0.20);
  return std::nullopt;
}

// Methods benchmarked for a preset; the radial and median estimators are
// defined for a single exposure only.
inline std::vector<Method> preset_methods(const SimConfig& cfg) {
  if (cfg.n_exposures == 1)
    return {Method::FullModel, Method::Standard, Method::Sanderson, Method::Presso,
            Method::Radial,    Method::GCQ,      Method::Median};
  return {Method::FullModel, Method::Standard, Method::Sanderson, Method::Presso, Method::GCQ};
}

}  // namespace mrhet
