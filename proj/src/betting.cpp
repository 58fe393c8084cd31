#include "scoremix/betting.hpp"

#include <cmath>

namespace scoremix {

Outcome observed_outcome(const MatchRecord& record) {
  if (record.goals_home > record.goals_away) return Outcome::Win;
  if (record.goals_home < record.goals_away) return Outcome::Loss;
  return Outcome::Draw;
}

double average_correct_probability(const std::vector<ProbTriple>& forecasts,
                                   const std::vector<Outcome>& observed) {
  if (forecasts.size() != observed.size())
    throw LengthMismatch("forecast and outcome counts differ");
  if (forecasts.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i)
    acc += forecasts[i].of(observed[i]);
  return acc / static_cast<double>(forecasts.size());
}

namespace {

struct Candidate {
  Outcome outcome;
  double p;
  double d;
  double ev;
};

// highest EV; equal EVs go to the higher model probability, then to the
// earlier outcome in (Win, Draw, Loss) order
Candidate best_candidate(const ProbTriple& forecast,
                         const DecimalOddsTriple& odds) {
  const Candidate cands[3] = {
      {Outcome::Win, forecast.win, odds.win, forecast.win * odds.win - 1.0},
      {Outcome::Draw, forecast.draw, odds.draw,
       forecast.draw * odds.draw - 1.0},
      {Outcome::Loss, forecast.loss, odds.loss,
       forecast.loss * odds.loss - 1.0}};
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (cands[i].ev > cands[best].ev ||
        (cands[i].ev == cands[best].ev && cands[i].p > cands[best].p))
      best = i;
  }
  return cands[best];
}

}  // namespace

BetRecord strategy_a(const ProbTriple& forecast, const DecimalOddsTriple& odds,
                     bool only_positive_ev) {
  const Candidate c = best_candidate(forecast, odds);
  BetRecord bet;
  bet.chosen = c.outcome;
  bet.odd = c.d;
  bet.expected_profit = c.ev;
  bet.variance = c.p * (1.0 - c.p) * c.d * c.d;
  if (only_positive_ev && c.ev <= 0.0) return bet;  // NoBet
  bet.placed = true;
  bet.stake = 1.0;
  return bet;
}

BetRecord strategy_b(const ProbTriple& forecast,
                     const DecimalOddsTriple& odds) {
  const Candidate c = best_candidate(forecast, odds);
  BetRecord bet;
  bet.chosen = c.outcome;
  bet.odd = c.d;
  bet.expected_profit = c.ev;
  bet.variance = c.p * (1.0 - c.p) * c.d * c.d;
  if (c.ev <= 0.0) return bet;  // NoBet
  bet.placed = true;
  bet.stake = bet.variance > 0.0
                  ? std::min(std::max(c.ev / bet.variance, 0.0), 1.0)
                  : 1.0;
  return bet;
}

BacktestReport backtest(const std::map<int, ProbTriple>& forecasts,
                        const DatasetView& test, Strategy strategy,
                        const std::vector<std::string>& bookmakers,
                        bool only_positive_ev) {
  BacktestReport report;
  report.overall.bookmaker = "all";

  std::map<std::string, std::vector<double>> profits;
  std::vector<double> all_profits;
  for (const std::string& bk : bookmakers) {
    report.rows.push_back({bk, 0, 0, 0.0, 0.0, 0.0, {}});
    profits[bk] = {};
  }

  for (int id : test.match_ids) {
    const AugmentedMatch& am = test.dataset->matches[id];
    auto fc = forecasts.find(id);
    if (fc == forecasts.end()) continue;
    const Outcome result = observed_outcome(am.record);

    for (std::size_t b = 0; b < bookmakers.size(); ++b) {
      BookmakerResult& row = report.rows[b];
      auto odds_it = am.record.odds.find(bookmakers[b]);
      if (odds_it == am.record.odds.end()) {
        ++row.skipped;
        continue;
      }
      BetRecord bet = strategy == Strategy::A
                          ? strategy_a(fc->second, odds_it->second,
                                       only_positive_ev)
                          : strategy_b(fc->second, odds_it->second);
      bet.match_id = id;
      if (bet.placed) {
        bet.profit = bet.chosen == result ? bet.stake * (bet.odd - 1.0)
                                          : -bet.stake;
        ++row.bets;
        row.total_profit += bet.profit;
        row.bankroll.push_back(row.total_profit);
        profits[bookmakers[b]].push_back(bet.profit);
        ++report.overall.bets;
        report.overall.total_profit += bet.profit;
        report.overall.bankroll.push_back(report.overall.total_profit);
        all_profits.push_back(bet.profit);
      }
      report.bets.push_back(bet);
    }
  }

  auto finalize = [](BookmakerResult& row, const std::vector<double>& xs) {
    if (row.bets > 0) row.mean_profit = row.total_profit / row.bets;
    if (row.bets > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - row.mean_profit) * (x - row.mean_profit);
      const double sd = std::sqrt(ss / (row.bets - 1));
      row.se = sd / std::sqrt(static_cast<double>(row.bets));
    }
  };
  for (std::size_t b = 0; b < bookmakers.size(); ++b)
    finalize(report.rows[b], profits[bookmakers[b]]);
  finalize(report.overall, all_profits);
  return report;
}

}  // namespace scoremix
