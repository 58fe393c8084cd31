#ifndef SCOREMIX_BETTING_HPP
#define SCOREMIX_BETTING_HPP

#include <map>
#include <string>
#include <vector>

#include "scoremix/data.hpp"

namespace scoremix {

struct BetRecord {
  int match_id = -1;
  Outcome chosen = Outcome::Win;
  bool placed = false;
  double stake = 0.0;
  double odd = 0.0;
  double profit = 0.0;           // realized; filled by the backtest
  double expected_profit = 0.0;  // at bet time, per unit stake
  double variance = 0.0;         // of the unit-stake profit
};

enum class Strategy { A, B };

/// Mean probability assigned to the realized outcome.
double average_correct_probability(const std::vector<ProbTriple>& forecasts,
                                   const std::vector<Outcome>& observed);

/// Bets one unit on the outcome with the highest expected return
/// EV_i = p_i d_i - 1; ties go to the higher model probability. With
/// only_positive_ev set, a non-positive best EV returns NoBet.
BetRecord strategy_a(const ProbTriple& forecast, const DecimalOddsTriple& odds,
                     bool only_positive_ev);

/// Variable stake EV/Var on the best positive-EV outcome, clamped to
/// [0, 1]; Var_i = p_i (1 - p_i) d_i^2. No positive EV, no bet.
BetRecord strategy_b(const ProbTriple& forecast,
                     const DecimalOddsTriple& odds);

struct BookmakerResult {
  std::string bookmaker;
  long bets = 0;
  long skipped = 0;  // matches without this bookmaker's odds
  double total_profit = 0.0;
  double mean_profit = 0.0;  // per bet
  double se = 0.0;           // sample SD / sqrt(bets)
  std::vector<double> bankroll;  // cumulative profit after each bet
};

struct BacktestReport {
  std::vector<BookmakerResult> rows;  // per bookmaker, config order
  BookmakerResult overall;
  std::vector<BetRecord> bets;  // every placed or skipped decision, in order
};

/// Applies one strategy per match per selected bookmaker over the test
/// view. `forecasts` maps dataset match id to the model's probabilities.
BacktestReport backtest(const std::map<int, ProbTriple>& forecasts,
                        const DatasetView& test, Strategy strategy,
                        const std::vector<std::string>& bookmakers,
                        bool only_positive_ev = false);

Outcome observed_outcome(const MatchRecord& record);

}  // namespace scoremix

#endif
