#ifndef SCOREMIX_MODEL_HPP
#define SCOREMIX_MODEL_HPP

#include <Eigen/Dense>
#include <vector>

#include "scoremix/data.hpp"
#include "scoremix/skellam.hpp"

namespace scoremix {

struct PriorConfig {
  double beta_a = 1.0;  ///< mixture-weight Beta hyperparameters
  double beta_b = 1.0;
  double hyper_mean_variance = 10.0;    ///< mu, mu_att, mu_def ~ N(0, v)
  double effect_sigma_scale = 2.5;      ///< half-Cauchy scale for sigma_att/def
  double lambda_prior_variance = 10.0;  ///< lambda ~ truncN(alpha, v, 0, inf)
  double alpha_prior_variance = 100.0;  ///< alpha ~ truncN(0, v, 0, inf)
  double tau_scale = 2.5;               ///< half-Cauchy scale for tau1/tau2
};

/// One match as the likelihood sees it: indices, scores, and sufficient
/// statistics of the attached bookmaker rates.
struct FitMatch {
  int match_id = -1;  // id in the source dataset
  int home = 0;
  int away = 0;
  int season = 0;
  int goals_home = 0;
  int goals_away = 0;
  bool scores_observed = true;
  int n_bookmakers = 0;
  double sum_home = 0.0;
  double sumsq_home = 0.0;
  double sum_away = 0.0;
  double sumsq_away = 0.0;
};

/// Immutable fit input shared by likelihood evaluations and the sampler.
/// `matches` fixes the per-match parameter ordering. Matches from an
/// optional odds-only view (a test season whose odds are public before
/// kickoff) enter with scores_observed = false: they contribute only the
/// bookmaker layer.
struct FitData {
  int n_teams = 0;
  int n_seasons = 0;
  bool away_intercept = false;
  std::vector<FitMatch> matches;

  int n_matches() const { return static_cast<int>(matches.size()); }

  static FitData build(const Dataset& dataset, const DatasetView& train,
                       const DatasetView* odds_only = nullptr,
                       bool away_intercept = false);
};

struct ModelParameters {
  double mu = 0.0;
  double mu_att = 0.0;
  double mu_def = 0.0;
  double sigma_att = 0.5;
  double sigma_def = 0.5;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double tau1 = 0.5;
  double tau2 = 0.5;
  Eigen::MatrixXd att;  // n_teams x n_seasons, columns sum to zero
  Eigen::MatrixXd def;
  Eigen::ArrayXd p_home, p_away;            // per fit match, in [0,1]
  Eigen::ArrayXd lambda_home, lambda_away;  // per fit match, positive

  static ModelParameters zeros(int n_teams, int n_seasons, int n_matches);
};

/// Writes a season column from its (T-1)-dimensional free coordinates;
/// the last team's effect is implied, keeping the column sum at zero.
void set_effect_column(Eigen::MatrixXd& effects, int season,
                       const Eigen::VectorXd& free);
Eigen::VectorXd free_from_column(const Eigen::MatrixXd& effects, int season);

RatePair score_rates(const ModelParameters& params, const FitMatch& m,
                     bool away_intercept = false);
RatePair mixture_rates(const ModelParameters& params, const FitData& fit,
                       int match_index);

/// One match's score log-likelihood contribution (zero when unobserved).
double score_log_term(const ModelParameters& params, const FitData& fit,
                      int match_index);
/// One match's bookmaker-layer contribution, via the cached sufficient
/// statistics of its implicit rates.
double bookmaker_log_term(const ModelParameters& params, const FitData& fit,
                          int match_index);

double log_likelihood_scores(const ModelParameters& params,
                             const FitData& fit);
double log_likelihood_bookmakers(const ModelParameters& params,
                                 const FitData& fit);
double log_prior(const ModelParameters& params, const PriorConfig& priors);
/// Sum of the three components; -inf signals a boundary violation and is
/// treated as a rejected proposal by the sampler.
double log_posterior(const ModelParameters& params, const FitData& fit,
                     const PriorConfig& priors);

}  // namespace scoremix

#endif
