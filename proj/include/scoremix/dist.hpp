#ifndef SCOREMIX_DIST_HPP
#define SCOREMIX_DIST_HPP

#include <algorithm>
#include <cmath>
#include <vector>

namespace scoremix {

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

/// log(k!) from a table; covers every count this code ever sees.
double log_factorial(int k);

inline double poisson_log_pmf(int k, double rate) {
  return static_cast<double>(k) * std::log(rate) - rate - log_factorial(k);
}

inline double normal_log_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance)) - 0.5 * d * d / variance;
}

/// Standard normal CDF.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

/// log Phi(x), stable for large negative x.
double normal_log_cdf(double x);

/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement step; accurate to ~1e-15).
double normal_quantile(double p);

/// Density of N(mean, variance) truncated to [0, inf), evaluated at x >= 0.
/// Includes the parameter-dependent normalizing constant log Phi(mean/sd).
inline double trunc_normal_log_pdf(double x, double mean, double variance) {
  const double sd = std::sqrt(variance);
  return normal_log_pdf(x, mean, variance) - normal_log_cdf(mean / sd);
}

/// Half-Cauchy(0, scale) log-density for x > 0.
inline double half_cauchy_log_pdf(double x, double scale) {
  const double r = x / scale;
  return std::log(2.0 / M_PI) - std::log(scale) - std::log1p(r * r);
}

/// Beta(a, b) log-density; finite at the boundary whenever the
/// corresponding exponent vanishes (a = 1 or b = 1).
double beta_log_pdf(double p, double a, double b);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Order-independent sum: sorts the terms, then accumulates with
/// compensation. The same multiset of terms gives the same bits.
inline double stable_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  CompensatedSum acc;
  for (double t : terms) acc.add(t);
  return acc.value();
}

}  // namespace scoremix

#endif
