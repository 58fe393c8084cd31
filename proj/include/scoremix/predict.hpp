#ifndef SCOREMIX_PREDICT_HPP
#define SCOREMIX_PREDICT_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "scoremix/mcmc.hpp"

namespace scoremix {

/// Full posterior propagation for one fixture: every retained draw
/// contributes its own Skellam probabilities and score grid.
struct MatchForecast {
  int match_id = -1;
  ProbTriple probs;       // exact simplex
  Eigen::MatrixXd grid;   // P(Y1=i, Y2=j), i,j in [0, grid_max]
  RatePair mean_rates;    // posterior mean of the mixed rates
  bool used_match_params = false;  // (p, lambda) draws entered the mix
};

struct ForecastOptions {
  bool use_test_odds = true;
  int grid_max = 10;
  int thin = 1;  // keep every thin-th draw
};

/// A fixture to forecast or simulate; `match_id` links it to per-match
/// (p, lambda) draws when those were sampled.
struct Fixture {
  int match_id = -1;
  int home = -1;
  int away = -1;
  int season = 0;
};

MatchForecast forecast_match(const PosteriorDraws& draws,
                             const Fixture& fixture,
                             const ForecastOptions& opts = {});

/// Replicated score sets for posterior predictive checking: one row of
/// (home, away) scores per kept draw, training matches in fit order.
struct ScoreReplication {
  std::vector<int> match_ids;
  Eigen::ArrayXXi home;  // reps x matches
  Eigen::ArrayXXi away;
};

ScoreReplication replicate_scores(const PosteriorDraws& draws,
                                  const FitData& fit, int thin = 4,
                                  std::uint64_t seed = 7);

enum class PpcStatistic { MeanGoalDiff, DrawFrequency, TotalGoals,
                          MaxHomeScore };

std::string to_string(PpcStatistic s);

double ppc_statistic(PpcStatistic stat,
                     const std::vector<std::pair<int, int>>& scores);

/// Tail-area probability P(T(rep) > T(obs)); strict inequality, so a
/// constant statistic gives exactly 0.
double bayesian_p_value(const ScoreReplication& replication,
                        const FitData& fit, PpcStatistic stat);

struct SeasonSimulation {
  std::vector<int> teams;           // team ids present in the fixtures
  Eigen::MatrixXd rank_probs;       // teams x ranks
  Eigen::MatrixXd points_quantiles; // teams x 3 (q25, median, q75)
  Eigen::VectorXd points_mean;
  int n_simulations = 0;
  bool incomplete_fixtures = false;
};

SeasonSimulation simulate_season(const PosteriorDraws& draws,
                                 const std::vector<Fixture>& fixtures,
                                 int n_simulations, std::uint64_t seed,
                                 const ForecastOptions& opts = {});

}  // namespace scoremix

#endif
