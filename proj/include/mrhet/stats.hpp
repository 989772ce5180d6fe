#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "mrhet/errors.hpp"

namespace mrhet {

struct WlsFit {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  // (X' W X)^{-1}, fixed-weight convention
  Eigen::VectorXd residuals;
  double weighted_rss = 0.0;
};

namespace detail {

// Regularized incomplete gamma: P(a,x) by power series (x < a+1),
// Q(a,x) by modified Lentz continued fraction otherwise.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (long n = 0; n < 10'000'000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (long i = 1; i < 10'000'000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// P(X > x) for X ~ chi-squared with df degrees of freedom.
inline double chi2_sf(double x, double df) {
  if (!(df > 0.0) || !std::isfinite(df)) throw InvalidDf("df must be positive, got " + std::to_string(df));
  if (std::isnan(x)) throw InvalidArgument("chi2_sf: x is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double a = 0.5 * df;
  const double xx = 0.5 * x;
  if (xx < a + 1.0) return 1.0 - detail::gamma_p_series(a, xx);
  return detail::gamma_q_contfrac(a, xx);
}

inline double chi2_cdf(double x, double df) { return 1.0 - chi2_sf(x, df); }

// Inverse CDF via bisection on the survival function (monotone in x).
inline double chi2_quantile(double p, double df) {
  if (!(df > 0.0) || !std::isfinite(df)) throw InvalidDf("df must be positive, got " + std::to_string(df));
  if (!(p > 0.0 && p < 1.0)) throw InvalidP("p must be in (0,1), got " + std::to_string(p));
  const double target = 1.0 - p;  // sf value at the quantile
  double lo = 0.0;
  double hi = std::max(df, 1.0);
  while (chi2_sf(hi, df) > target) {
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (chi2_sf(mid, df) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double two_sided_p(double z) {
  return std::min(1.0, 2.0 * normal_sf(std::abs(z)));
}

// Midpoint convention: even-length input returns the mean of the two central
// order statistics.
inline double median(std::vector<double> xs) {
  if (xs.empty()) throw EmptyInput("median of empty vector");
  const std::size_t n = xs.size();
  const std::size_t mid = n / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double upper = xs[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Pairwise summation; keeps reductions bit-stable regardless of thread count
// because callers always sum full, ordered spans.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double v : xs) s += v;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Weighted least squares of y on X without intercept, weights w > 0.
// Covariance is (X' W X)^{-1} with no dispersion factor, i.e. the standard
// errors are exact when the weights are true inverse variances.
inline WlsFit weighted_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (y.size() != n || w.size() != n) throw InvalidArgument("weighted_ls: dimension mismatch");
  const Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
  const Eigen::VectorXd b = X.transpose() * (w.array() * y.array()).matrix();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) {
    throw RankDeficient("exposure matrix has collinear columns (rank < " + std::to_string(d) + ")");
  }
  WlsFit fit;
  fit.coefficients = lu.solve(b);
  fit.covariance = lu.inverse();
  fit.residuals = y - X * fit.coefficients;
  fit.weighted_rss = (w.array() * fit.residuals.array().square()).sum();
  return fit;
}

}  // namespace mrhet
