#ifndef SCOREMIX_SKELLAM_HPP
#define SCOREMIX_SKELLAM_HPP

#include <optional>

#include "scoremix/odds.hpp"

namespace scoremix {

/// Poisson scoring intensities for one match, home then away.
struct RatePair {
  double home = 0.0;
  double away = 0.0;
};

/// Largest scoring intensity the inversion will consider.
inline constexpr double kRateCap = 12.0;

/// P(Y1 - Y2 = k) for independent Poisson Y1 ~ rates.home, Y2 ~ rates.away.
/// Direct summation over the joint diagonal, truncated when terms drop
/// below 1e-16 past the mode.
double skellam_pmf(int k, const RatePair& rates);

/// Three-way probabilities {P(Y1>Y2), P(Y1=Y2), P(Y1<Y2)} with the goal
/// difference truncated at |k| <= 60.
ProbTriple three_way_probs(const RatePair& rates);

/// Inverts three-way probabilities into the implicit scoring rates:
/// the pair whose Skellam probabilities reproduce `probs` to 1e-7 or
/// better. Damped Newton on {P(win), P(draw)} with a finite-difference
/// Jacobian; throws NoConvergence when no rate pair under the cap fits.
RatePair implicit_rates(const ProbTriple& probs,
                        std::optional<RatePair> init = std::nullopt);

}  // namespace scoremix

#endif
