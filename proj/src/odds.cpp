#include "scoremix/odds.hpp"

#include <cmath>
#include <string>

namespace scoremix {

OddsTriple invert_decimal_odds(const DecimalOddsTriple& d) {
  for (double v : {d.win, d.draw, d.loss}) {
    if (!(v > 1.0))
      throw NonPositiveOdd("decimal odd must exceed 1, got " +
                           std::to_string(v));
  }
  return {1.0 / d.win, 1.0 / d.draw, 1.0 / d.loss};
}

ProbTriple basic_normalize(const OddsTriple& o) {
  const double beta = o.booksum();
  if (!(beta > 0.0)) throw DegenerateOdds("booksum must be positive");
  return {o.win / beta, o.draw / beta, o.loss / beta};
}

ProbTriple shin_probabilities(const OddsTriple& o, double z) {
  if (!(z >= 0.0 && z < 1.0))
    throw InvalidRate("insider rate must lie in [0,1), got " +
                      std::to_string(z));
  const double beta = o.booksum();
  const double denom = 2.0 * (1.0 - z);
  auto component = [&](double oi) {
    return (std::sqrt(z * z + 4.0 * (1.0 - z) * oi * oi / beta) - z) / denom;
  };
  return {component(o.win), component(o.draw), component(o.loss)};
}

namespace {

double shin_excess(const OddsTriple& o, double z) {
  const ProbTriple p = shin_probabilities(o, z);
  return p.sum() - 1.0;
}

}  // namespace

ShinResult estimate_shin_z(const OddsTriple& o) {
  ShinResult result;
  const double beta = o.booksum();
  if (!(beta > 0.0)) throw DegenerateOdds("booksum must be positive");
  if (beta < 1.0) {
    // fair or sub-fair market: the insider model presumes an overround
    result.probs = basic_normalize(o);
    result.z = 0.0;
    result.residual = 0.0;
    result.fallback = true;
    return result;
  }

  double lo = 0.0;
  double hi = 0.5;
  double f_lo = shin_excess(o, lo);  // sqrt(beta) - 1 >= 0
  double f_hi = shin_excess(o, hi);
  double z = 0.0;
  double fz = f_lo;
  if (f_lo <= 1e-13) {
    z = 0.0;
    fz = f_lo;
  } else if (f_hi > 0.0) {
    // overround so extreme that the root exceeds 0.5; treat like
    // unusable market data
    result.probs = basic_normalize(o);
    result.z = 0.0;
    result.residual = 0.0;
    result.fallback = true;
    return result;
  } else {
    for (int iter = 0; iter < 200; ++iter) {
      z = 0.5 * (lo + hi);
      fz = shin_excess(o, z);
      if (std::abs(fz) < 1e-13 || hi - lo < 1e-16) break;
      if (fz > 0.0)
        lo = z;
      else
        hi = z;
    }
  }

  ProbTriple p = shin_probabilities(o, z);
  const double s = p.sum();
  result.residual = std::abs(s - 1.0);
  result.probs = {p.win / s, p.draw / s, p.loss / s};
  result.z = z;
  return result;
}

}  // namespace scoremix
