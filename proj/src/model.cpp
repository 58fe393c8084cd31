#include "scoremix/model.hpp"

#include <cmath>
#include <limits>

#include "scoremix/dist.hpp"

namespace scoremix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

FitData FitData::build(const Dataset& dataset, const DatasetView& train,
                       const DatasetView* odds_only, bool away_intercept) {
  FitData fit;
  fit.n_teams = dataset.n_teams();
  fit.n_seasons = dataset.n_seasons;
  fit.away_intercept = away_intercept;

  auto push = [&](int match_id, bool scores_observed) {
    const AugmentedMatch& am = dataset.matches[match_id];
    FitMatch fm;
    fm.match_id = match_id;
    fm.home = am.record.home_team;
    fm.away = am.record.away_team;
    fm.season = am.record.season;
    fm.goals_home = am.record.goals_home;
    fm.goals_away = am.record.goals_away;
    fm.scores_observed = scores_observed;
    for (const auto& [bk, rate] : am.implicit) {
      ++fm.n_bookmakers;
      fm.sum_home += rate.home;
      fm.sumsq_home += rate.home * rate.home;
      fm.sum_away += rate.away;
      fm.sumsq_away += rate.away * rate.away;
    }
    fit.matches.push_back(fm);
  };

  for (int id : train.match_ids) push(id, true);
  if (odds_only) {
    for (int id : odds_only->match_ids) {
      // only matches with bookmaker information carry (p, lambda)
      if (!dataset.matches[id].implicit.empty()) push(id, false);
    }
  }
  return fit;
}

ModelParameters ModelParameters::zeros(int n_teams, int n_seasons,
                                       int n_matches) {
  ModelParameters p;
  p.att = Eigen::MatrixXd::Zero(n_teams, n_seasons);
  p.def = Eigen::MatrixXd::Zero(n_teams, n_seasons);
  p.p_home = Eigen::ArrayXd::Constant(n_matches, 0.5);
  p.p_away = Eigen::ArrayXd::Constant(n_matches, 0.5);
  p.lambda_home = Eigen::ArrayXd::Constant(n_matches, 1.0);
  p.lambda_away = Eigen::ArrayXd::Constant(n_matches, 1.0);
  return p;
}

void set_effect_column(Eigen::MatrixXd& effects, int season,
                       const Eigen::VectorXd& free) {
  const int T = static_cast<int>(effects.rows());
  effects.col(season).head(T - 1) = free;
  effects(T - 1, season) = -free.sum();
}

Eigen::VectorXd free_from_column(const Eigen::MatrixXd& effects, int season) {
  const int T = static_cast<int>(effects.rows());
  return effects.col(season).head(T - 1);
}

RatePair score_rates(const ModelParameters& params, const FitMatch& m,
                     bool away_intercept) {
  const double home_log = params.mu + params.att(m.home, m.season) +
                          params.def(m.away, m.season);
  double away_log =
      params.att(m.away, m.season) + params.def(m.home, m.season);
  if (away_intercept) away_log += params.mu;
  return {std::exp(home_log), std::exp(away_log)};
}

RatePair mixture_rates(const ModelParameters& params, const FitData& fit,
                       int match_index) {
  const FitMatch& m = fit.matches[match_index];
  const RatePair theta = score_rates(params, m, fit.away_intercept);
  const double p1 = params.p_home[match_index];
  const double p2 = params.p_away[match_index];
  return {p1 * theta.home + (1.0 - p1) * params.lambda_home[match_index],
          p2 * theta.away + (1.0 - p2) * params.lambda_away[match_index]};
}

double score_log_term(const ModelParameters& params, const FitData& fit,
                      int i) {
  const FitMatch& m = fit.matches[i];
  if (!m.scores_observed) return 0.0;
  const RatePair g = mixture_rates(params, fit, i);
  return poisson_log_pmf(m.goals_home, g.home) +
         poisson_log_pmf(m.goals_away, g.away);
}

// sum over the attached bookmaker rates of log truncN(theta_hat; lambda,
// tau^2, 0, inf), from the cached sufficient statistics
double bookmaker_log_term(const ModelParameters& params, const FitData& fit,
                          int i) {
  const FitMatch& m = fit.matches[i];
  if (m.n_bookmakers == 0) return 0.0;
  const double n = m.n_bookmakers;
  const double l1 = params.lambda_home[i];
  const double l2 = params.lambda_away[i];
  const double v1 = params.tau1 * params.tau1;
  const double v2 = params.tau2 * params.tau2;
  double t = 0.0;
  t += -0.5 * n * (kLogTwoPi + std::log(v1)) -
       0.5 * (m.sumsq_home - 2.0 * l1 * m.sum_home + n * l1 * l1) / v1 -
       n * normal_log_cdf(l1 / params.tau1);
  t += -0.5 * n * (kLogTwoPi + std::log(v2)) -
       0.5 * (m.sumsq_away - 2.0 * l2 * m.sum_away + n * l2 * l2) / v2 -
       n * normal_log_cdf(l2 / params.tau2);
  return t;
}

double log_likelihood_scores(const ModelParameters& params,
                             const FitData& fit) {
  std::vector<double> terms;
  terms.reserve(fit.matches.size());
  for (int i = 0; i < fit.n_matches(); ++i)
    if (fit.matches[i].scores_observed)
      terms.push_back(score_log_term(params, fit, i));
  return stable_sum(terms);
}

double log_likelihood_bookmakers(const ModelParameters& params,
                                 const FitData& fit) {
  if (!(params.tau1 > 0.0 && params.tau2 > 0.0)) return kNegInf;
  std::vector<double> terms;
  terms.reserve(fit.matches.size());
  for (int i = 0; i < fit.n_matches(); ++i)
    if (fit.matches[i].n_bookmakers > 0)
      terms.push_back(bookmaker_log_term(params, fit, i));
  return stable_sum(terms);
}

double log_prior(const ModelParameters& params, const PriorConfig& priors) {
  if (!(params.sigma_att > 0.0 && params.sigma_def > 0.0)) return kNegInf;
  if (!(params.tau1 > 0.0 && params.tau2 > 0.0)) return kNegInf;
  if (!(params.alpha1 > 0.0 && params.alpha2 > 0.0)) return kNegInf;
  if ((params.lambda_home <= 0.0).any() || (params.lambda_away <= 0.0).any())
    return kNegInf;
  if ((params.p_home < 0.0).any() || (params.p_home > 1.0).any() ||
      (params.p_away < 0.0).any() || (params.p_away > 1.0).any())
    return kNegInf;

  std::vector<double> terms;
  const int T = static_cast<int>(params.att.rows());
  const int S = static_cast<int>(params.att.cols());
  terms.reserve(4 * T * S + 4 * params.p_home.size() + 16);

  terms.push_back(normal_log_pdf(params.mu, 0.0, priors.hyper_mean_variance));
  terms.push_back(
      normal_log_pdf(params.mu_att, 0.0, priors.hyper_mean_variance));
  terms.push_back(
      normal_log_pdf(params.mu_def, 0.0, priors.hyper_mean_variance));
  terms.push_back(
      half_cauchy_log_pdf(params.sigma_att, priors.effect_sigma_scale));
  terms.push_back(
      half_cauchy_log_pdf(params.sigma_def, priors.effect_sigma_scale));

  // seasonal evolution of the team effects, evaluated on the zero-sum
  // constrained representation
  const double va = params.sigma_att * params.sigma_att;
  const double vd = params.sigma_def * params.sigma_def;
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < T; ++t) {
      const double am = s == 0 ? params.mu_att
                               : params.mu_att + params.att(t, s - 1);
      const double dm = s == 0 ? params.mu_def
                               : params.mu_def + params.def(t, s - 1);
      terms.push_back(normal_log_pdf(params.att(t, s), am, va));
      terms.push_back(normal_log_pdf(params.def(t, s), dm, vd));
    }
  }

  for (int i = 0; i < params.p_home.size(); ++i) {
    terms.push_back(beta_log_pdf(params.p_home[i], priors.beta_a,
                                 priors.beta_b));
    terms.push_back(beta_log_pdf(params.p_away[i], priors.beta_a,
                                 priors.beta_b));
    terms.push_back(trunc_normal_log_pdf(params.lambda_home[i], params.alpha1,
                                         priors.lambda_prior_variance));
    terms.push_back(trunc_normal_log_pdf(params.lambda_away[i], params.alpha2,
                                         priors.lambda_prior_variance));
  }

  terms.push_back(
      trunc_normal_log_pdf(params.alpha1, 0.0, priors.alpha_prior_variance));
  terms.push_back(
      trunc_normal_log_pdf(params.alpha2, 0.0, priors.alpha_prior_variance));
  terms.push_back(half_cauchy_log_pdf(params.tau1, priors.tau_scale));
  terms.push_back(half_cauchy_log_pdf(params.tau2, priors.tau_scale));

  return stable_sum(terms);
}

double log_posterior(const ModelParameters& params, const FitData& fit,
                     const PriorConfig& priors) {
  const double prior = log_prior(params, priors);
  if (!std::isfinite(prior)) return kNegInf;
  const double value = prior + log_likelihood_scores(params, fit) +
                       log_likelihood_bookmakers(params, fit);
  return std::isfinite(value) ? value : kNegInf;
}

}  // namespace scoremix
