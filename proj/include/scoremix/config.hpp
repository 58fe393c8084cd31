#ifndef SCOREMIX_CONFIG_HPP
#define SCOREMIX_CONFIG_HPP

#include <string>
#include <vector>

#include "scoremix/mcmc.hpp"

namespace scoremix {

/// Everything a run needs, serialized verbatim into the output directory
/// so any result can be reproduced from its config file alone.
struct RunConfig {
  std::string league = "league";
  std::string data_dir = ".";
  std::string out_dir = "out";
  std::string method = "shin";  // basic | shin
  int test_season = -1;         // -1 selects the last season
  SamplerConfig sampler;
  PriorConfig priors;
  bool use_test_odds = true;
  bool only_positive_ev = false;
  bool away_intercept = false;
  int replication_thin = 4;
  int forecast_thin = 1;
  int n_simulations = 5000;
  std::vector<std::string> bookmakers = {"B365", "BW", "IW", "LB",
                                         "SB",   "VC", "WH"};
};

RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& config);

/// Applies one `key = value` override; throws Error on unknown keys.
void set_config_key(RunConfig& config, const std::string& key,
                    const std::string& value);

}  // namespace scoremix

#endif
