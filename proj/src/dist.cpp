#include "scoremix/dist.hpp"

#include <array>
#include <limits>
#include <stdexcept>

namespace scoremix {

namespace {

constexpr int kLogFactTableSize = 4096;

const std::array<double, kLogFactTableSize>& log_fact_table() {
  static const auto table = [] {
    std::array<double, kLogFactTableSize> t{};
    t[0] = 0.0;
    for (int k = 1; k < kLogFactTableSize; ++k)
      t[k] = t[k - 1] + std::log(static_cast<double>(k));
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(int k) {
  if (k < 0) throw std::domain_error("log_factorial: negative argument");
  if (k < kLogFactTableSize) return log_fact_table()[k];
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double normal_log_cdf(double x) {
  if (x > -1.0) {
    // Phi(x) well away from 0; log1p on the complement is exact enough
    return std::log1p(-0.5 * std::erfc(x * 0.7071067811865475244));
  }
  const double u = -x * 0.7071067811865475244;  // erfc argument, positive
  if (u < 25.0) {
    return std::log(0.5 * std::erfc(u));
  }
  // asymptotic erfc(u) ~ exp(-u^2)/(u sqrt(pi)) (1 - 1/(2u^2) + 3/(4u^4))
  const double u2 = u * u;
  const double series = 1.0 - 0.5 / u2 + 0.75 / (u2 * u2);
  return -u2 - std::log(u) - 0.5 * std::log(M_PI) + std::log(series) -
         0.6931471805599453094;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p outside (0,1)");

  // Acklam's approximation
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // one Halley step against the exact CDF
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double beta_log_pdf(double p, double a, double b) {
  if (p < 0.0 || p > 1.0) return -std::numeric_limits<double>::infinity();
  const double log_norm =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  double t = 0.0;
  if (a != 1.0) t += (a - 1.0) * std::log(p);
  if (b != 1.0) t += (b - 1.0) * std::log1p(-p);
  return log_norm + t;
}

}  // namespace scoremix
