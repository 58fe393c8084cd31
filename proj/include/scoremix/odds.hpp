#ifndef SCOREMIX_ODDS_HPP
#define SCOREMIX_ODDS_HPP

#include "scoremix/errors.hpp"

namespace scoremix {

enum class Outcome { Win = 0, Draw = 1, Loss = 2 };

/// Quoted decimal odds for the three-way market; every entry > 1.
struct DecimalOddsTriple {
  double win = 0.0;
  double draw = 0.0;
  double loss = 0.0;
};

/// Inverse odds, each in (0, 1). Their sum (the booksum) normally
/// exceeds 1 by the bookmaker margin.
struct OddsTriple {
  double win = 0.0;
  double draw = 0.0;
  double loss = 0.0;
  double booksum() const { return win + draw + loss; }
};

/// A point on the probability simplex.
struct ProbTriple {
  double win = 0.0;
  double draw = 0.0;
  double loss = 0.0;
  double sum() const { return win + draw + loss; }
  double of(Outcome o) const {
    switch (o) {
      case Outcome::Win: return win;
      case Outcome::Draw: return draw;
      default: return loss;
    }
  }
};

struct ShinResult {
  ProbTriple probs;
  double z = 0.0;         ///< fitted insider-trading rate
  double residual = 0.0;  ///< |sum pi(z) - 1| achieved before renormalizing
  bool fallback = false;  ///< true when booksum < 1 forced basic normalization
};

OddsTriple invert_decimal_odds(const DecimalOddsTriple& d);

ProbTriple basic_normalize(const OddsTriple& o);

/// Shin probabilities at a given insider rate z in [0, 1). Does not
/// renormalize: the entries sum to 1 only at the fitted z.
ProbTriple shin_probabilities(const OddsTriple& o, double z);

/// Solves sum pi(z) = 1 for z in [0, 0.5] by bisection and returns the
/// renormalized probabilities. Sub-fair books (booksum < 1) fall back to
/// basic normalization with z = 0 and the fallback flag set.
ShinResult estimate_shin_z(const OddsTriple& o);

}  // namespace scoremix

#endif
