#ifndef SCOREMIX_MCMC_HPP
#define SCOREMIX_MCMC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "scoremix/model.hpp"

namespace scoremix {

/// Enables or disables whole update blocks; everything a disabled block
/// owns stays frozen at its starting value.
struct BlockToggles {
  bool global = true;           // mu, mu_att, mu_def
  bool att = true;              // per-season attack vectors
  bool def = true;              // per-season defence vectors
  bool scales = true;           // sigma_att, sigma_def
  bool match_params = true;     // per-match (p, lambda)
  bool bookmaker_hyper = true;  // alpha1, alpha2, tau1, tau2
};

struct SamplerConfig {
  int n_iterations = 5000;
  int n_burnin = 1000;
  int n_chains = 4;
  std::uint64_t seed = 1;
  int adaptation_window = 50;
  double target_acceptance = 0.35;
  BlockToggles blocks;
};

struct BlockStat {
  std::string name;
  long proposals = 0;
  long accepted = 0;
  long proposals_post = 0;  // after burn-in, scales frozen
  long accepted_post = 0;
  double scale = 0.0;
  double rate() const {
    return proposals > 0 ? static_cast<double>(accepted) / proposals : 0.0;
  }
  double rate_post() const {
    return proposals_post > 0
               ? static_cast<double>(accepted_post) / proposals_post
               : 0.0;
  }
};

/// Maps the flattened draw vector onto named scalars. Column order:
/// the nine global scalars, att by season-major (team, season), def
/// likewise, then (p1, p2, l1, l2) per fit match.
struct ParamLayout {
  int n_teams = 0;
  int n_seasons = 0;
  bool away_intercept = false;
  std::vector<int> match_ids;
  std::vector<std::string> names;

  int n_params() const { return static_cast<int>(names.size()); }
  int n_matches() const { return static_cast<int>(match_ids.size()); }
  int col_att(int team, int season) const {
    return 9 + season * n_teams + team;
  }
  int col_def(int team, int season) const {
    return 9 + n_teams * n_seasons + season * n_teams + team;
  }
  int col_match(int index) const {
    return 9 + 2 * n_teams * n_seasons + 4 * index;
  }

  static ParamLayout for_fit(const FitData& fit);
  Eigen::VectorXd pack(const ModelParameters& params) const;
  ModelParameters unpack(const Eigen::VectorXd& row) const;
};

struct ChainDraws {
  Eigen::MatrixXd draws;  // retained x n_params
  std::vector<BlockStat> blocks;
};

struct PosteriorDraws {
  ParamLayout layout;
  SamplerConfig config;
  std::vector<ChainDraws> chains;
  double wall_seconds = 0.0;  // not persisted

  int total_retained() const;
  /// Draw by global index, chains concatenated in order.
  Eigen::VectorXd draw(int index) const;
};

/// Data-informed starting point: effects at zero, mu at the log of the
/// empirical home/away goal ratio, lambda at the bookmaker-mean rates.
ModelParameters initial_state(const FitData& fit, const PriorConfig& priors);

ChainDraws run_chain(const FitData& fit, const PriorConfig& priors,
                     const SamplerConfig& config, int chain_id,
                     const ModelParameters* start = nullptr);

PosteriorDraws run_sampler(const FitData& fit, const PriorConfig& priors,
                           const SamplerConfig& config,
                           const ModelParameters* start = nullptr);

struct DiagnosticRow {
  std::string param;
  double rhat = 0.0;
  double ess = 0.0;
  bool defined = true;  // false for zero-variance scalars
  bool flagged = false;
};

struct DiagnosticsReport {
  std::vector<DiagnosticRow> rows;
  std::vector<BlockStat> acceptance;  // pooled over chains
  double max_rhat = 0.0;
  int n_flagged = 0;
};

/// Split-chain rank-normalized R-hat and bulk effective sample size;
/// flags any scalar with R-hat > 1.01.
DiagnosticsReport diagnostics(const PosteriorDraws& draws);

void save_draws(const std::string& path, const PosteriorDraws& draws);
PosteriorDraws load_draws(const std::string& path);
void save_diagnostics(const std::string& path,
                      const DiagnosticsReport& report);

}  // namespace scoremix

#endif
