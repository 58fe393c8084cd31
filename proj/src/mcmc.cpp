#include "scoremix/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

#include "scoremix/dist.hpp"
#include "scoremix/rng.hpp"

namespace scoremix {

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p) - std::log1p(-p); }

}  // namespace

ParamLayout ParamLayout::for_fit(const FitData& fit) {
  ParamLayout lay;
  lay.n_teams = fit.n_teams;
  lay.n_seasons = fit.n_seasons;
  lay.away_intercept = fit.away_intercept;
  for (const FitMatch& m : fit.matches) lay.match_ids.push_back(m.match_id);

  lay.names = {"mu",     "mu_att", "mu_def", "sigma_att", "sigma_def",
               "alpha1", "alpha2", "tau1",   "tau2"};
  for (int s = 0; s < lay.n_seasons; ++s)
    for (int t = 0; t < lay.n_teams; ++t)
      lay.names.push_back("att." + std::to_string(t) + "." +
                          std::to_string(s));
  for (int s = 0; s < lay.n_seasons; ++s)
    for (int t = 0; t < lay.n_teams; ++t)
      lay.names.push_back("def." + std::to_string(t) + "." +
                          std::to_string(s));
  for (int id : lay.match_ids) {
    lay.names.push_back("p1." + std::to_string(id));
    lay.names.push_back("p2." + std::to_string(id));
    lay.names.push_back("l1." + std::to_string(id));
    lay.names.push_back("l2." + std::to_string(id));
  }
  return lay;
}

Eigen::VectorXd ParamLayout::pack(const ModelParameters& p) const {
  Eigen::VectorXd v(n_params());
  v[0] = p.mu;
  v[1] = p.mu_att;
  v[2] = p.mu_def;
  v[3] = p.sigma_att;
  v[4] = p.sigma_def;
  v[5] = p.alpha1;
  v[6] = p.alpha2;
  v[7] = p.tau1;
  v[8] = p.tau2;
  for (int s = 0; s < n_seasons; ++s)
    for (int t = 0; t < n_teams; ++t) v[col_att(t, s)] = p.att(t, s);
  for (int s = 0; s < n_seasons; ++s)
    for (int t = 0; t < n_teams; ++t) v[col_def(t, s)] = p.def(t, s);
  for (int i = 0; i < n_matches(); ++i) {
    v[col_match(i)] = p.p_home[i];
    v[col_match(i) + 1] = p.p_away[i];
    v[col_match(i) + 2] = p.lambda_home[i];
    v[col_match(i) + 3] = p.lambda_away[i];
  }
  return v;
}

ModelParameters ParamLayout::unpack(const Eigen::VectorXd& v) const {
  ModelParameters p = ModelParameters::zeros(n_teams, n_seasons, n_matches());
  p.mu = v[0];
  p.mu_att = v[1];
  p.mu_def = v[2];
  p.sigma_att = v[3];
  p.sigma_def = v[4];
  p.alpha1 = v[5];
  p.alpha2 = v[6];
  p.tau1 = v[7];
  p.tau2 = v[8];
  for (int s = 0; s < n_seasons; ++s)
    for (int t = 0; t < n_teams; ++t) p.att(t, s) = v[col_att(t, s)];
  for (int s = 0; s < n_seasons; ++s)
    for (int t = 0; t < n_teams; ++t) p.def(t, s) = v[col_def(t, s)];
  for (int i = 0; i < n_matches(); ++i) {
    p.p_home[i] = v[col_match(i)];
    p.p_away[i] = v[col_match(i) + 1];
    p.lambda_home[i] = v[col_match(i) + 2];
    p.lambda_away[i] = v[col_match(i) + 3];
  }
  return p;
}

int PosteriorDraws::total_retained() const {
  int n = 0;
  for (const auto& c : chains) n += static_cast<int>(c.draws.rows());
  return n;
}

Eigen::VectorXd PosteriorDraws::draw(int index) const {
  for (const auto& c : chains) {
    const int n = static_cast<int>(c.draws.rows());
    if (index < n) return c.draws.row(index);
    index -= n;
  }
  throw Error("draw index out of range");
}

ModelParameters initial_state(const FitData& fit, const PriorConfig&) {
  ModelParameters p =
      ModelParameters::zeros(fit.n_teams, fit.n_seasons, fit.n_matches());
  double home_goals = 0.0, away_goals = 0.0;
  for (const FitMatch& m : fit.matches) {
    if (!m.scores_observed) continue;
    home_goals += m.goals_home;
    away_goals += m.goals_away;
  }
  p.mu = (home_goals > 0.0 && away_goals > 0.0)
             ? std::log(home_goals / away_goals)
             : 0.0;

  double lambda_tot1 = 0.0, lambda_tot2 = 0.0;
  int with_bk = 0;
  for (int i = 0; i < fit.n_matches(); ++i) {
    const FitMatch& m = fit.matches[i];
    if (m.n_bookmakers > 0) {
      p.lambda_home[i] = std::max(m.sum_home / m.n_bookmakers, 0.05);
      p.lambda_away[i] = std::max(m.sum_away / m.n_bookmakers, 0.05);
      lambda_tot1 += p.lambda_home[i];
      lambda_tot2 += p.lambda_away[i];
      ++with_bk;
    }
  }
  if (with_bk > 0) {
    p.alpha1 = std::max(lambda_tot1 / with_bk, 0.1);
    p.alpha2 = std::max(lambda_tot2 / with_bk, 0.1);
  }
  p.tau1 = p.tau2 = 0.3;
  p.sigma_att = p.sigma_def = 0.5;
  return p;
}

namespace {

/// One chain of blocked adaptive random-walk Metropolis. Scales, weights
/// and bookmaker hyperparameters are proposed on unconstrained scales
/// (log / logit) with the Jacobian folded into the local target.
class ChainSampler {
 public:
  ChainSampler(const FitData& fit, const PriorConfig& priors,
               const SamplerConfig& cfg, std::uint64_t seed,
               const ModelParameters& start)
      : fit_(fit), priors_(priors), cfg_(cfg), rng_(seed), params_(start) {
    season_matches_.resize(fit.n_seasons);
    for (int i = 0; i < fit.n_matches(); ++i)
      if (fit.matches[i].scores_observed)
        season_matches_[fit.matches[i].season].push_back(i);

    logit_p1_ = params_.p_home.unaryExpr([](double p) { return logit(p); });
    logit_p2_ = params_.p_away.unaryExpr([](double p) { return logit(p); });
    log_l1_ = params_.lambda_home.log();
    log_l2_ = params_.lambda_away.log();
    log_sigma_att_ = std::log(params_.sigma_att);
    log_sigma_def_ = std::log(params_.sigma_def);
    log_alpha1_ = std::log(params_.alpha1);
    log_alpha2_ = std::log(params_.alpha2);
    log_tau1_ = std::log(params_.tau1);
    log_tau2_ = std::log(params_.tau2);

    global_block_ = add_block("global", 0.05);
    att_block_base_ = static_cast<int>(blocks_.size());
    for (int s = 0; s < fit.n_seasons; ++s)
      add_block("att." + std::to_string(s), 0.1);
    def_block_base_ = static_cast<int>(blocks_.size());
    for (int s = 0; s < fit.n_seasons; ++s)
      add_block("def." + std::to_string(s), 0.1);
    scales_block_ = add_block("scales", 0.2);
    hyper_block_ = add_block("hyper", 0.1);
    match_block_ = add_block("match", 0.4);
    match_log_scales_.assign(fit.n_matches(), std::log(0.4));
  }

  ChainDraws run() {
    if (!std::isfinite(log_posterior(params_, fit_, priors_)))
      throw NonFiniteStart("initial state has non-finite posterior");

    const ParamLayout layout = ParamLayout::for_fit(fit_);
    ChainDraws out;
    out.draws.resize(cfg_.n_iterations - cfg_.n_burnin, layout.n_params());

    for (int iter = 0; iter < cfg_.n_iterations; ++iter) {
      adapting_ = iter < cfg_.n_burnin;
      ++sweep_count_;
      sweep();
      if (iter >= cfg_.n_burnin)
        out.draws.row(iter - cfg_.n_burnin) = layout.pack(params_);
    }

    for (Block& b : blocks_) {
      BlockStat stat;
      stat.name = b.name;
      stat.proposals = b.proposals;
      stat.accepted = b.accepted;
      stat.proposals_post = b.proposals_post;
      stat.accepted_post = b.accepted_post;
      stat.scale = std::exp(b.log_scale);
      out.blocks.push_back(stat);
    }
    // the per-match scales vary; report the geometric mean
    if (!match_log_scales_.empty()) {
      double m = 0.0;
      for (double ls : match_log_scales_) m += ls;
      out.blocks.back().scale = std::exp(m / match_log_scales_.size());
    }
    return out;
  }

 private:
  struct Block {
    std::string name;
    double log_scale = 0.0;
    long proposals = 0;
    long accepted = 0;
    long proposals_post = 0;
    long accepted_post = 0;
  };

  int add_block(const std::string& name, double scale) {
    blocks_.push_back({name, std::log(scale), 0, 0});
    return static_cast<int>(blocks_.size()) - 1;
  }

  // Robbins-Monro step size; decays slowly enough to keep adapting over
  // the whole burn-in, vanishes afterwards
  double adapt_gamma(long t) const {
    return std::pow(
        1.0 + static_cast<double>(t) / cfg_.adaptation_window, -0.6);
  }

  // --- local target pieces ----------------------------------------------

  double scores_all() const {
    double acc = 0.0;
    for (int i = 0; i < fit_.n_matches(); ++i)
      if (fit_.matches[i].scores_observed)
        acc += score_log_term(params_, fit_, i);
    return acc;
  }

  double scores_season(int s) const {
    double acc = 0.0;
    for (int i : season_matches_[s]) acc += score_log_term(params_, fit_, i);
    return acc;
  }

  // evolution terms touching column s of one effect matrix; the s+1 terms
  // are included because their means depend on column s
  double evolution_local(const Eigen::MatrixXd& effects, double drift,
                         double sigma, int s) const {
    const double v = sigma * sigma;
    double acc = 0.0;
    for (int t = 0; t < fit_.n_teams; ++t) {
      const double mean = s == 0 ? drift : drift + effects(t, s - 1);
      acc += normal_log_pdf(effects(t, s), mean, v);
    }
    if (s + 1 < fit_.n_seasons)
      for (int t = 0; t < fit_.n_teams; ++t)
        acc += normal_log_pdf(effects(t, s + 1), drift + effects(t, s), v);
    return acc;
  }

  double evolution_all() const {
    double acc = 0.0;
    const double va = params_.sigma_att * params_.sigma_att;
    const double vd = params_.sigma_def * params_.sigma_def;
    for (int s = 0; s < fit_.n_seasons; ++s) {
      for (int t = 0; t < fit_.n_teams; ++t) {
        const double am =
            s == 0 ? params_.mu_att : params_.mu_att + params_.att(t, s - 1);
        const double dm =
            s == 0 ? params_.mu_def : params_.mu_def + params_.def(t, s - 1);
        acc += normal_log_pdf(params_.att(t, s), am, va);
        acc += normal_log_pdf(params_.def(t, s), dm, vd);
      }
    }
    return acc;
  }

  double hyper_mean_priors() const {
    return normal_log_pdf(params_.mu, 0.0, priors_.hyper_mean_variance) +
           normal_log_pdf(params_.mu_att, 0.0, priors_.hyper_mean_variance) +
           normal_log_pdf(params_.mu_def, 0.0, priors_.hyper_mean_variance);
  }

  double bookmakers_all() const {
    double acc = 0.0;
    for (int i = 0; i < fit_.n_matches(); ++i)
      if (fit_.matches[i].n_bookmakers > 0)
        acc += bookmaker_log_term(params_, fit_, i);
    return acc;
  }

  double lambda_priors_all() const {
    double acc = 0.0;
    for (int i = 0; i < fit_.n_matches(); ++i) {
      acc += trunc_normal_log_pdf(params_.lambda_home[i], params_.alpha1,
                                  priors_.lambda_prior_variance);
      acc += trunc_normal_log_pdf(params_.lambda_away[i], params_.alpha2,
                                  priors_.lambda_prior_variance);
    }
    return acc;
  }

  double match_local(int i) const {
    return score_log_term(params_, fit_, i) +
           bookmaker_log_term(params_, fit_, i) +
           beta_log_pdf(params_.p_home[i], priors_.beta_a, priors_.beta_b) +
           beta_log_pdf(params_.p_away[i], priors_.beta_a, priors_.beta_b) +
           trunc_normal_log_pdf(params_.lambda_home[i], params_.alpha1,
                                priors_.lambda_prior_variance) +
           trunc_normal_log_pdf(params_.lambda_away[i], params_.alpha2,
                                priors_.lambda_prior_variance);
  }

  // --- block updates ------------------------------------------------------

  // decide, tally and adapt in one place; returns acceptance
  bool resolve(Block& b, double delta, double* log_scale) {
    const double alpha =
        std::isfinite(delta) ? std::min(1.0, std::exp(delta)) : 0.0;
    const bool ok = std::log(rng_.uniform()) < delta;
    ++b.proposals;
    if (ok) ++b.accepted;
    if (!adapting_) {
      ++b.proposals_post;
      if (ok) ++b.accepted_post;
    }
    if (adapting_ && log_scale) {
      *log_scale += adapt_gamma(b.proposals) *
                    (alpha - cfg_.target_acceptance);
      *log_scale = std::min(std::max(*log_scale, -15.0), 5.0);
    }
    return ok;
  }

  void update_global() {
    Block& b = blocks_[global_block_];
    const double scale = std::exp(b.log_scale);
    const double old_mu = params_.mu;
    const double old_ma = params_.mu_att;
    const double old_md = params_.mu_def;
    const double before =
        scores_all() + evolution_all() + hyper_mean_priors();
    params_.mu += scale * rng_.normal();
    params_.mu_att += scale * rng_.normal();
    params_.mu_def += scale * rng_.normal();
    const double after =
        scores_all() + evolution_all() + hyper_mean_priors();
    if (!resolve(b, after - before, &b.log_scale)) {
      params_.mu = old_mu;
      params_.mu_att = old_ma;
      params_.mu_def = old_md;
    }
  }

  void update_effect_column(bool is_att, int s) {
    if (fit_.n_teams < 2) return;
    Block& b = blocks_[(is_att ? att_block_base_ : def_block_base_) + s];
    const double scale = std::exp(b.log_scale);
    Eigen::MatrixXd& effects = is_att ? params_.att : params_.def;
    const double drift = is_att ? params_.mu_att : params_.mu_def;
    const double sigma = is_att ? params_.sigma_att : params_.sigma_def;
    const Eigen::VectorXd old_col = effects.col(s);

    const double before =
        scores_season(s) + evolution_local(effects, drift, sigma, s);
    Eigen::VectorXd free = free_from_column(effects, s);
    for (int t = 0; t < free.size(); ++t) free[t] += scale * rng_.normal();
    set_effect_column(effects, s, free);
    const double after =
        scores_season(s) + evolution_local(effects, drift, sigma, s);
    if (!resolve(b, after - before, &b.log_scale)) effects.col(s) = old_col;
  }

  void update_scales() {
    Block& b = blocks_[scales_block_];
    const double scale = std::exp(b.log_scale);
    const double old_lsa = log_sigma_att_, old_lsd = log_sigma_def_;
    const double old_sa = params_.sigma_att, old_sd = params_.sigma_def;

    auto local = [&] {
      return evolution_all() +
             half_cauchy_log_pdf(params_.sigma_att,
                                 priors_.effect_sigma_scale) +
             half_cauchy_log_pdf(params_.sigma_def,
                                 priors_.effect_sigma_scale) +
             log_sigma_att_ + log_sigma_def_;
    };
    const double before = local();
    log_sigma_att_ += scale * rng_.normal();
    log_sigma_def_ += scale * rng_.normal();
    params_.sigma_att = std::exp(log_sigma_att_);
    params_.sigma_def = std::exp(log_sigma_def_);
    const double after = local();
    if (!resolve(b, after - before, &b.log_scale)) {
      log_sigma_att_ = old_lsa;
      log_sigma_def_ = old_lsd;
      params_.sigma_att = old_sa;
      params_.sigma_def = old_sd;
    }
  }

  void update_hyper() {
    Block& b = blocks_[hyper_block_];
    const double scale = std::exp(b.log_scale);
    const double old_la1 = log_alpha1_, old_la2 = log_alpha2_;
    const double old_lt1 = log_tau1_, old_lt2 = log_tau2_;
    const double old_a1 = params_.alpha1, old_a2 = params_.alpha2;
    const double old_t1 = params_.tau1, old_t2 = params_.tau2;

    auto local = [&] {
      return bookmakers_all() + lambda_priors_all() +
             trunc_normal_log_pdf(params_.alpha1, 0.0,
                                  priors_.alpha_prior_variance) +
             trunc_normal_log_pdf(params_.alpha2, 0.0,
                                  priors_.alpha_prior_variance) +
             half_cauchy_log_pdf(params_.tau1, priors_.tau_scale) +
             half_cauchy_log_pdf(params_.tau2, priors_.tau_scale) +
             log_alpha1_ + log_alpha2_ + log_tau1_ + log_tau2_;
    };
    const double before = local();
    log_alpha1_ += scale * rng_.normal();
    log_alpha2_ += scale * rng_.normal();
    log_tau1_ += scale * rng_.normal();
    log_tau2_ += scale * rng_.normal();
    params_.alpha1 = std::exp(log_alpha1_);
    params_.alpha2 = std::exp(log_alpha2_);
    params_.tau1 = std::exp(log_tau1_);
    params_.tau2 = std::exp(log_tau2_);
    const double after = local();
    if (!resolve(b, after - before, &b.log_scale)) {
      log_alpha1_ = old_la1;
      log_alpha2_ = old_la2;
      log_tau1_ = old_lt1;
      log_tau2_ = old_lt2;
      params_.alpha1 = old_a1;
      params_.alpha2 = old_a2;
      params_.tau1 = old_t1;
      params_.tau2 = old_t2;
    }
  }

  void update_match(int i) {
    Block& b = blocks_[match_block_];
    const double scale = std::exp(match_log_scales_[i]);
    const double old_v1 = logit_p1_[i], old_v2 = logit_p2_[i];
    const double old_u1 = log_l1_[i], old_u2 = log_l2_[i];
    const double old_p1 = params_.p_home[i], old_p2 = params_.p_away[i];
    const double old_l1 = params_.lambda_home[i];
    const double old_l2 = params_.lambda_away[i];

    auto jacobian = [&] {
      return -(softplus(logit_p1_[i]) + softplus(-logit_p1_[i])) -
             (softplus(logit_p2_[i]) + softplus(-logit_p2_[i])) +
             log_l1_[i] + log_l2_[i];
    };
    const double before = match_local(i) + jacobian();
    logit_p1_[i] += scale * rng_.normal();
    logit_p2_[i] += scale * rng_.normal();
    log_l1_[i] += scale * rng_.normal();
    log_l2_[i] += scale * rng_.normal();
    params_.p_home[i] = sigmoid(logit_p1_[i]);
    params_.p_away[i] = sigmoid(logit_p2_[i]);
    params_.lambda_home[i] = std::exp(log_l1_[i]);
    params_.lambda_away[i] = std::exp(log_l2_[i]);
    const double after = match_local(i) + jacobian();

    const double delta = after - before;
    const double alpha =
        std::isfinite(delta) ? std::min(1.0, std::exp(delta)) : 0.0;
    const bool ok = std::log(rng_.uniform()) < delta;
    ++b.proposals;
    if (ok) ++b.accepted;
    if (!adapting_) {
      ++b.proposals_post;
      if (ok) ++b.accepted_post;
    }
    if (!ok) {
      logit_p1_[i] = old_v1;
      logit_p2_[i] = old_v2;
      log_l1_[i] = old_u1;
      log_l2_[i] = old_u2;
      params_.p_home[i] = old_p1;
      params_.p_away[i] = old_p2;
      params_.lambda_home[i] = old_l1;
      params_.lambda_away[i] = old_l2;
    }
    if (adapting_) {
      double ls = match_log_scales_[i] +
                  adapt_gamma(sweep_count_) *
                      (alpha - cfg_.target_acceptance);
      match_log_scales_[i] = std::min(std::max(ls, -15.0), 5.0);
    }
  }

  void sweep() {
    if (cfg_.blocks.global) update_global();
    if (cfg_.blocks.att)
      for (int s = 0; s < fit_.n_seasons; ++s) update_effect_column(true, s);
    if (cfg_.blocks.def)
      for (int s = 0; s < fit_.n_seasons; ++s) update_effect_column(false, s);
    if (cfg_.blocks.scales) update_scales();
    if (cfg_.blocks.bookmaker_hyper) update_hyper();
    if (cfg_.blocks.match_params)
      for (int i = 0; i < fit_.n_matches(); ++i) update_match(i);
  }

  const FitData& fit_;
  const PriorConfig& priors_;
  const SamplerConfig& cfg_;
  Rng rng_;
  ModelParameters params_;
  std::vector<std::vector<int>> season_matches_;

  Eigen::ArrayXd logit_p1_, logit_p2_, log_l1_, log_l2_;
  double log_sigma_att_ = 0.0, log_sigma_def_ = 0.0;
  double log_alpha1_ = 0.0, log_alpha2_ = 0.0;
  double log_tau1_ = 0.0, log_tau2_ = 0.0;

  std::vector<Block> blocks_;
  std::vector<double> match_log_scales_;
  int global_block_ = -1, att_block_base_ = -1, def_block_base_ = -1;
  int scales_block_ = -1, hyper_block_ = -1, match_block_ = -1;
  long sweep_count_ = 0;
  bool adapting_ = true;
};

}  // namespace

ChainDraws run_chain(const FitData& fit, const PriorConfig& priors,
                     const SamplerConfig& config, int chain_id,
                     const ModelParameters* start) {
  if (config.n_burnin >= config.n_iterations)
    throw Error("burn-in must be smaller than the iteration count");
  const std::uint64_t chain_seed =
      splitmix64(config.seed + 0x9e3779b97f4a7c15ULL *
                                   (static_cast<std::uint64_t>(chain_id) + 1));
  const ModelParameters init = start ? *start : initial_state(fit, priors);
  ChainSampler sampler(fit, priors, config, chain_seed, init);
  return sampler.run();
}

PosteriorDraws run_sampler(const FitData& fit, const PriorConfig& priors,
                           const SamplerConfig& config,
                           const ModelParameters* start) {
  const auto t0 = std::chrono::steady_clock::now();
  PosteriorDraws out;
  out.layout = ParamLayout::for_fit(fit);
  out.config = config;
  out.chains.resize(config.n_chains);

  std::vector<std::exception_ptr> errors(config.n_chains);
  std::vector<std::thread> pool;
  for (int c = 0; c < config.n_chains; ++c) {
    pool.emplace_back([&, c] {
      try {
        out.chains[c] = run_chain(fit, priors, config, c, start);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (int c = 0; c < config.n_chains; ++c) {
    if (errors[c]) {
      try {
        std::rethrow_exception(errors[c]);
      } catch (const std::exception& e) {
        throw Error("chain " + std::to_string(c) + ": " + e.what());
      }
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace scoremix
