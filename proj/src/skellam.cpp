#include "scoremix/skellam.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "scoremix/dist.hpp"

namespace scoremix {

double skellam_pmf(int k, const RatePair& rates) {
  const double th1 = std::max(rates.home, 1e-12);
  const double th2 = std::max(rates.away, 1e-12);
  const int kp = k > 0 ? k : 0;
  const int kn = k < 0 ? -k : 0;

  // first term of sum_j Pois(j+kp; th1) Pois(j+kn; th2), then the
  // multiplicative recurrence along the diagonal
  double term = std::exp(kp * std::log(th1) + kn * std::log(th2) - th1 - th2 -
                         log_factorial(kp) - log_factorial(kn));
  const double past_mode = std::sqrt(th1 * th2);
  const double cross = th1 * th2;

  double acc = 0.0;
  for (int j = 0; j < 4096; ++j) {
    acc += term;
    if (term < 1e-16 && j >= past_mode) break;
    term *= cross / ((static_cast<double>(j) + 1.0 + kp) *
                     (static_cast<double>(j) + 1.0 + kn));
  }
  return acc;
}

ProbTriple three_way_probs(const RatePair& rates) {
  ProbTriple p;
  p.draw = skellam_pmf(0, rates);
  for (int k = 1; k <= 60; ++k) {
    p.win += skellam_pmf(k, rates);
    p.loss += skellam_pmf(-k, rates);
    if (p.sum() > 1.0 - 1e-12) break;
  }
  return p;
}

namespace {

Eigen::Vector2d residual(const RatePair& r, const ProbTriple& target) {
  const ProbTriple p = three_way_probs(r);
  return {p.win - target.win, p.draw - target.draw};
}

double clamp_rate(double th) {
  return std::min(std::max(th, 1e-6), kRateCap);
}

}  // namespace

RatePair implicit_rates(const ProbTriple& probs, std::optional<RatePair> init) {
  for (double v : {probs.win, probs.draw, probs.loss}) {
    if (!(v > 0.0 && v < 1.0))
      throw InvalidSimplex("probabilities must lie strictly inside (0,1)");
  }
  if (std::abs(probs.sum() - 1.0) > 1e-6)
    throw InvalidSimplex("probabilities sum to " + std::to_string(probs.sum()));

  RatePair r;
  if (init) {
    r = {clamp_rate(init->home), clamp_rate(init->away)};
  } else {
    // total-goals prior of 2.5; split so the normal approximation to the
    // goal difference matches p_win - p_loss
    const double total = 2.5;
    const double q = probs.win - probs.loss;
    double delta = std::sqrt(total) * normal_quantile(0.5 * (1.0 + q));
    delta = std::min(std::max(delta, -total + 0.2), total - 0.2);
    r = {0.5 * (total + delta), 0.5 * (total - delta)};
  }

  Eigen::Vector2d f = residual(r, probs);
  double fnorm = f.norm();
  for (int iter = 0; iter < 200; ++iter) {
    if (std::max(std::abs(f[0]), std::abs(f[1])) < 1e-10) break;

    const double h1 = 1e-6 * std::max(1.0, r.home);
    const double h2 = 1e-6 * std::max(1.0, r.away);
    Eigen::Matrix2d jac;
    jac.col(0) = (residual({r.home + h1, r.away}, probs) - f) / h1;
    jac.col(1) = (residual({r.home, r.away + h2}, probs) - f) / h2;
    if (std::abs(jac.determinant()) < 1e-14)
      throw NoConvergence("implicit_rates: singular Jacobian");

    const Eigen::Vector2d full_step = jac.inverse() * f;
    double damp = 1.0;
    RatePair next = r;
    Eigen::Vector2d f_next = f;
    double fnorm_next = fnorm;
    for (int halving = 0; halving < 40; ++halving) {
      next = {clamp_rate(r.home - damp * full_step[0]),
              clamp_rate(r.away - damp * full_step[1])};
      f_next = residual(next, probs);
      fnorm_next = f_next.norm();
      if (fnorm_next < fnorm) break;
      damp *= 0.5;
    }
    if (fnorm_next >= fnorm) {
      // stalled; no descent direction under the cap
      break;
    }
    r = next;
    f = f_next;
    fnorm = fnorm_next;
  }

  if (std::max(std::abs(f[0]), std::abs(f[1])) > 1e-7)
    throw NoConvergence(
        "implicit_rates: no rate pair reproduces the probabilities "
        "(residual " +
        std::to_string(fnorm) + ")");
  return r;
}

}  // namespace scoremix
