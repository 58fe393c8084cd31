#include "scoremix/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace scoremix {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw Error("expected a boolean, got '" + v + "'");
}

}  // namespace

void set_config_key(RunConfig& c, const std::string& key,
                    const std::string& value) {
  const std::string v = trim(value);
  if (key == "league") c.league = v;
  else if (key == "data_dir") c.data_dir = v;
  else if (key == "out_dir") c.out_dir = v;
  else if (key == "method") c.method = v;
  else if (key == "test_season") c.test_season = std::stoi(v);
  else if (key == "iterations") c.sampler.n_iterations = std::stoi(v);
  else if (key == "burnin") c.sampler.n_burnin = std::stoi(v);
  else if (key == "chains") c.sampler.n_chains = std::stoi(v);
  else if (key == "seed") c.sampler.seed = std::stoull(v);
  else if (key == "adaptation_window")
    c.sampler.adaptation_window = std::stoi(v);
  else if (key == "target_acceptance")
    c.sampler.target_acceptance = std::stod(v);
  else if (key == "use_test_odds") c.use_test_odds = parse_bool(v);
  else if (key == "only_positive_ev") c.only_positive_ev = parse_bool(v);
  else if (key == "away_intercept") c.away_intercept = parse_bool(v);
  else if (key == "replication_thin") c.replication_thin = std::stoi(v);
  else if (key == "forecast_thin") c.forecast_thin = std::stoi(v);
  else if (key == "n_simulations") c.n_simulations = std::stoi(v);
  else if (key == "beta_a") c.priors.beta_a = std::stod(v);
  else if (key == "beta_b") c.priors.beta_b = std::stod(v);
  else if (key == "hyper_mean_variance")
    c.priors.hyper_mean_variance = std::stod(v);
  else if (key == "effect_sigma_scale")
    c.priors.effect_sigma_scale = std::stod(v);
  else if (key == "lambda_prior_variance")
    c.priors.lambda_prior_variance = std::stod(v);
  else if (key == "alpha_prior_variance")
    c.priors.alpha_prior_variance = std::stod(v);
  else if (key == "tau_scale") c.priors.tau_scale = std::stod(v);
  else if (key == "bookmakers") {
    c.bookmakers.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) c.bookmakers.push_back(item);
    }
  } else {
    throw Error("unknown configuration key '" + key + "'");
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  RunConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(line_no) +
                  ": expected key = value");
    set_config_key(c, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return c;
}

void save_run_config(const std::string& path, const RunConfig& c) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write config '" + path + "'");
  out << "league = " << c.league << "\n";
  out << "data_dir = " << c.data_dir << "\n";
  out << "out_dir = " << c.out_dir << "\n";
  out << "method = " << c.method << "\n";
  out << "test_season = " << c.test_season << "\n";
  out << "iterations = " << c.sampler.n_iterations << "\n";
  out << "burnin = " << c.sampler.n_burnin << "\n";
  out << "chains = " << c.sampler.n_chains << "\n";
  out << "seed = " << c.sampler.seed << "\n";
  out << "adaptation_window = " << c.sampler.adaptation_window << "\n";
  out << "target_acceptance = " << fmt(c.sampler.target_acceptance) << "\n";
  out << "use_test_odds = " << (c.use_test_odds ? "true" : "false") << "\n";
  out << "only_positive_ev = " << (c.only_positive_ev ? "true" : "false")
      << "\n";
  out << "away_intercept = " << (c.away_intercept ? "true" : "false") << "\n";
  out << "replication_thin = " << c.replication_thin << "\n";
  out << "forecast_thin = " << c.forecast_thin << "\n";
  out << "n_simulations = " << c.n_simulations << "\n";
  out << "beta_a = " << fmt(c.priors.beta_a) << "\n";
  out << "beta_b = " << fmt(c.priors.beta_b) << "\n";
  out << "hyper_mean_variance = " << fmt(c.priors.hyper_mean_variance)
      << "\n";
  out << "effect_sigma_scale = " << fmt(c.priors.effect_sigma_scale) << "\n";
  out << "lambda_prior_variance = " << fmt(c.priors.lambda_prior_variance)
      << "\n";
  out << "alpha_prior_variance = " << fmt(c.priors.alpha_prior_variance)
      << "\n";
  out << "tau_scale = " << fmt(c.priors.tau_scale) << "\n";
  out << "bookmakers = ";
  for (std::size_t i = 0; i < c.bookmakers.size(); ++i) {
    if (i) out << ",";
    out << c.bookmakers[i];
  }
  out << "\n";
}

}  // namespace scoremix
