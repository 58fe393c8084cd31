// scoremix: bookmaker odds -> implicit scoring rates -> hierarchical
// Bayesian score model -> forecasts, season simulation and betting
// backtests. Subcommands compose through files in the output directory,
// so every stage can be rerun from its persisted config.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "scoremix/betting.hpp"
#include "scoremix/config.hpp"
#include "scoremix/data.hpp"
#include "scoremix/mcmc.hpp"
#include "scoremix/model.hpp"
#include "scoremix/odds.hpp"
#include "scoremix/predict.hpp"

namespace fs = std::filesystem;
using namespace scoremix;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string date_str(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::vector<std::string> season_files(const std::string& data_dir) {
  std::vector<std::string> files;
  if (!fs::is_directory(data_dir))
    throw Error("data directory '" + data_dir + "' does not exist");
  for (const auto& entry : fs::directory_iterator(data_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no .csv season files in '" + data_dir + "'");
  return files;
}

int resolve_test_season(const RunConfig& cfg, const Dataset& ds) {
  return cfg.test_season >= 0 ? cfg.test_season : ds.n_seasons - 1;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

void persist_config(const RunConfig& cfg) {
  save_run_config(out_path(cfg, "config.run").string(), cfg);
}

Dataset load_out_dataset(const RunConfig& cfg) {
  return load_dataset(out_path(cfg, "dataset.smx").string());
}

/// FitData exactly as `fit` built it; predict/ppc must agree with the
/// draws' parameter layout.
FitData rebuild_fit(const RunConfig& cfg, const Dataset& ds,
                    const DatasetView& train, const DatasetView& test) {
  return FitData::build(ds, train, cfg.use_test_odds ? &test : nullptr,
                        cfg.away_intercept);
}

void check_layout(const FitData& fit, const PosteriorDraws& draws) {
  const ParamLayout expect = ParamLayout::for_fit(fit);
  if (expect.names != draws.layout.names)
    throw Error(
        "draws file does not match the dataset/config (was it produced by "
        "this configuration?)");
}

// ---------------------------------------------------------------------------

int cmd_convert(const std::string& input, const std::string& output,
                const std::string& method_name) {
  const ProbMethod method = prob_method_from_string(method_name);
  LeagueConfig league;
  TeamIndex teams;
  LoadStats stats;
  const std::vector<MatchRecord> records =
      load_csv(input, league, teams, 0, &stats);

  std::ofstream out(output);
  if (!out) throw Error("cannot write '" + output + "'");
  out << "row\tdate\thome\taway\tbookmaker\tmethod\tp_win\tp_draw\tp_loss\t"
         "z\tresidual\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const MatchRecord& r = records[i];
    for (const auto& [bk, decimal] : r.odds) {
      const OddsTriple inv = invert_decimal_odds(decimal);
      ProbTriple p;
      double z = 0.0, residual = 0.0;
      if (method == ProbMethod::Basic) {
        p = basic_normalize(inv);
      } else {
        const ShinResult shin = estimate_shin_z(inv);
        p = shin.probs;
        z = shin.z;
        residual = shin.residual;
      }
      out << i << "\t" << date_str(r.date) << "\t"
          << teams.names[r.home_team] << "\t" << teams.names[r.away_team]
          << "\t" << bk << "\t" << to_string(method) << "\t" << fmt(p.win)
          << "\t" << fmt(p.draw) << "\t" << fmt(p.loss) << "\t" << fmt(z)
          << "\t" << fmt(residual) << "\n";
    }
  }
  std::cerr << "convert: " << records.size() << " rows, "
            << stats.dropped_rows << " dropped\n";
  return 0;
}

int cmd_ingest(const RunConfig& cfg) {
  LeagueConfig league{cfg.league, cfg.bookmakers};
  const Dataset ds = load_league(season_files(cfg.data_dir), league,
                                 prob_method_from_string(cfg.method));
  save_dataset(out_path(cfg, "dataset.smx").string(), ds);
  persist_config(cfg);
  std::cerr << "ingest: " << ds.matches.size() << " matches, "
            << ds.n_teams() << " teams, " << ds.n_seasons << " seasons, "
            << ds.stats.dropped_rows << " rows dropped, "
            << ds.stats.inversion_failures << " inversion failures\n";
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  const Dataset ds = load_out_dataset(cfg);
  const int test_season = resolve_test_season(cfg, ds);
  const auto [train, test] = split_by_season(ds, test_season);
  const FitData fit = rebuild_fit(cfg, ds, train, test);

  const PosteriorDraws draws = run_sampler(fit, cfg.priors, cfg.sampler);
  save_draws(out_path(cfg, "draws.tsv").string(), draws);

  const DiagnosticsReport report = diagnostics(draws);
  save_diagnostics(out_path(cfg, "diagnostics.tsv").string(), report);
  persist_config(cfg);

  std::cerr << "fit: " << draws.total_retained() << " retained draws over "
            << cfg.sampler.n_chains << " chains in " << draws.wall_seconds
            << " s; max R-hat " << report.max_rhat << ", " << report.n_flagged
            << " flagged\n";
  if (report.max_rhat > 1.05) {
    std::cerr << "fit: convergence failure (R-hat > 1.05)\n";
    return 3;
  }
  return 0;
}

int cmd_predict(const RunConfig& cfg) {
  const Dataset ds = load_out_dataset(cfg);
  const int test_season = resolve_test_season(cfg, ds);
  const auto [train, test] = split_by_season(ds, test_season);
  const FitData fit = rebuild_fit(cfg, ds, train, test);
  const PosteriorDraws draws =
      load_draws(out_path(cfg, "draws.tsv").string());
  check_layout(fit, draws);

  ForecastOptions opts;
  opts.use_test_odds = cfg.use_test_odds;
  opts.thin = cfg.forecast_thin;

  std::ofstream fout(out_path(cfg, "forecasts.tsv"));
  std::ofstream gout(out_path(cfg, "grids.tsv"));
  fout << "match\tseason\tdate\thome\taway\tp_win\tp_draw\tp_loss\t"
          "rate_home\trate_away\tgoals_home\tgoals_away\tused_odds\n";
  gout << "match\thome_goals\taway_goals\tprob\n";

  for (int id : test.match_ids) {
    const AugmentedMatch& am = ds.matches[id];
    const Fixture fx{id, am.record.home_team, am.record.away_team,
                     am.record.season};
    const MatchForecast fc = forecast_match(draws, fx, opts);
    fout << id << "\t" << am.record.season << "\t" << date_str(am.record.date)
         << "\t" << ds.teams.names[fx.home] << "\t" << ds.teams.names[fx.away]
         << "\t" << fmt(fc.probs.win) << "\t" << fmt(fc.probs.draw) << "\t"
         << fmt(fc.probs.loss) << "\t" << fmt(fc.mean_rates.home) << "\t"
         << fmt(fc.mean_rates.away) << "\t" << am.record.goals_home << "\t"
         << am.record.goals_away << "\t" << (fc.used_match_params ? 1 : 0)
         << "\n";
    for (int i = 0; i < fc.grid.rows(); ++i)
      for (int j = 0; j < fc.grid.cols(); ++j)
        gout << id << "\t" << i << "\t" << j << "\t" << fmt(fc.grid(i, j))
             << "\n";
  }
  persist_config(cfg);
  std::cerr << "predict: " << test.match_ids.size() << " forecasts\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const Dataset ds = load_out_dataset(cfg);
  const int test_season = resolve_test_season(cfg, ds);
  const auto [train, test] = split_by_season(ds, test_season);
  const FitData fit = rebuild_fit(cfg, ds, train, test);
  const PosteriorDraws draws =
      load_draws(out_path(cfg, "draws.tsv").string());
  check_layout(fit, draws);

  std::vector<Fixture> fixtures;
  for (int id : test.match_ids) {
    const MatchRecord& r = ds.matches[id].record;
    fixtures.push_back({id, r.home_team, r.away_team, r.season});
  }
  ForecastOptions opts;
  opts.use_test_odds = cfg.use_test_odds;
  const SeasonSimulation sim = simulate_season(
      draws, fixtures, cfg.n_simulations, cfg.sampler.seed, opts);
  if (sim.incomplete_fixtures)
    std::cerr << "simulate: warning, fixtures are not a full double "
                 "round-robin\n";

  std::ofstream out(out_path(cfg, "ranks.tsv"));
  out << "team\tname\tpoints_mean\tpoints_q25\tpoints_q50\tpoints_q75";
  for (std::size_t r = 0; r < sim.teams.size(); ++r)
    out << "\trank" << r + 1;
  out << "\n";
  for (std::size_t t = 0; t < sim.teams.size(); ++t) {
    out << sim.teams[t] << "\t" << ds.teams.names[sim.teams[t]] << "\t"
        << fmt(sim.points_mean[t]) << "\t" << fmt(sim.points_quantiles(t, 0))
        << "\t" << fmt(sim.points_quantiles(t, 1)) << "\t"
        << fmt(sim.points_quantiles(t, 2));
    for (std::size_t r = 0; r < sim.teams.size(); ++r)
      out << "\t" << fmt(sim.rank_probs(t, r));
    out << "\n";
  }
  persist_config(cfg);
  std::cerr << "simulate: " << sim.n_simulations << " seasons over "
            << sim.teams.size() << " teams\n";
  return 0;
}

int cmd_ppc(const RunConfig& cfg) {
  const Dataset ds = load_out_dataset(cfg);
  const int test_season = resolve_test_season(cfg, ds);
  const auto [train, test] = split_by_season(ds, test_season);
  const FitData fit = rebuild_fit(cfg, ds, train, test);
  const PosteriorDraws draws =
      load_draws(out_path(cfg, "draws.tsv").string());
  check_layout(fit, draws);

  const ScoreReplication rep = replicate_scores(
      draws, fit, cfg.replication_thin, cfg.sampler.seed);

  std::ofstream pout(out_path(cfg, "ppc_pvalues.tsv"));
  pout << "statistic\tobserved\tp_value\n";
  std::vector<std::pair<int, int>> observed;
  for (const FitMatch& m : fit.matches)
    if (m.scores_observed) observed.emplace_back(m.goals_home, m.goals_away);
  for (PpcStatistic stat :
       {PpcStatistic::MeanGoalDiff, PpcStatistic::DrawFrequency,
        PpcStatistic::TotalGoals, PpcStatistic::MaxHomeScore}) {
    pout << to_string(stat) << "\t" << fmt(ppc_statistic(stat, observed))
         << "\t" << fmt(bayesian_p_value(rep, fit, stat)) << "\n";
  }

  // replicated goal-difference distribution vs observed counts
  const int kmax = 10;
  std::ofstream dout(out_path(cfg, "ppc_goal_diff.tsv"));
  dout << "diff\tobserved\trep_mean\trep_q05\trep_q25\trep_q50\trep_q75\t"
          "rep_q95\n";
  const int reps = static_cast<int>(rep.home.rows());
  const int M = static_cast<int>(rep.home.cols());
  for (int k = -kmax; k <= kmax; ++k) {
    int obs = 0;
    for (auto [h, a] : observed) obs += (h - a) == k;
    std::vector<double> counts(reps, 0.0);
    for (int r = 0; r < reps; ++r) {
      int c = 0;
      for (int m = 0; m < M; ++m)
        c += (rep.home(r, m) - rep.away(r, m)) == k;
      counts[r] = c;
    }
    std::sort(counts.begin(), counts.end());
    auto q = [&](double p) {
      const double x = p * (reps - 1);
      const int lo = static_cast<int>(x);
      const int hi = std::min(lo + 1, reps - 1);
      return counts[lo] + (x - lo) * (counts[hi] - counts[lo]);
    };
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= reps;
    dout << k << "\t" << obs << "\t" << fmt(mean) << "\t" << fmt(q(0.05))
         << "\t" << fmt(q(0.25)) << "\t" << fmt(q(0.5)) << "\t" << fmt(q(0.75))
         << "\t" << fmt(q(0.95)) << "\n";
  }
  persist_config(cfg);
  std::cerr << "ppc: " << reps << " replications of " << M << " matches\n";
  return 0;
}

std::map<int, ProbTriple> read_forecasts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingDraws("cannot open forecasts '" + path + "'");
  std::map<int, ProbTriple> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
      if (ch == '\t') {
        f.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    f.push_back(cur);
    if (f.size() < 8) throw Error(path + ": short forecast line");
    out[std::stoi(f[0])] =
        ProbTriple{std::stod(f[5]), std::stod(f[6]), std::stod(f[7])};
  }
  return out;
}

int cmd_bet(const RunConfig& cfg) {
  const Dataset ds = load_out_dataset(cfg);
  const int test_season = resolve_test_season(cfg, ds);
  const auto [train, test] = split_by_season(ds, test_season);
  const std::map<int, ProbTriple> forecasts =
      read_forecasts(out_path(cfg, "forecasts.tsv").string());

  for (Strategy strategy : {Strategy::A, Strategy::B}) {
    const char tag = strategy == Strategy::A ? 'A' : 'B';
    const BacktestReport report =
        backtest(forecasts, test, strategy, cfg.bookmakers,
                 cfg.only_positive_ev);

    std::ofstream bout(out_path(cfg, std::string("bets_") + tag + ".tsv"));
    bout << "bookmaker\tbets\tskipped\ttotal_profit\tmean_profit\tse\n";
    auto row_line = [&](const BookmakerResult& r) {
      bout << r.bookmaker << "\t" << r.bets << "\t" << r.skipped << "\t"
           << fmt(r.total_profit) << "\t" << fmt(r.mean_profit) << "\t"
           << fmt(r.se) << "\n";
    };
    for (const BookmakerResult& r : report.rows) row_line(r);
    row_line(report.overall);

    std::ofstream kout(out_path(cfg, std::string("bankroll_") + tag +
                                          ".tsv"));
    kout << "bet\tcumulative_profit\n";
    for (std::size_t i = 0; i < report.overall.bankroll.size(); ++i)
      kout << i + 1 << "\t" << fmt(report.overall.bankroll[i]) << "\n";
  }

  // average correct probability: the model against both odds transforms
  std::ofstream pout(out_path(cfg, "pbar.tsv"));
  pout << "source\tpbar\tmatches\n";
  {
    std::vector<ProbTriple> fc;
    std::vector<Outcome> obs;
    for (int id : test.match_ids) {
      auto it = forecasts.find(id);
      if (it == forecasts.end()) continue;
      fc.push_back(it->second);
      obs.push_back(observed_outcome(ds.matches[id].record));
    }
    pout << "model\t" << fmt(average_correct_probability(fc, obs)) << "\t"
         << fc.size() << "\n";
  }
  for (ProbMethod method : {ProbMethod::Shin, ProbMethod::Basic}) {
    double pbar_sum = 0.0;
    int pbar_n = 0;
    for (const std::string& bk : cfg.bookmakers) {
      std::vector<ProbTriple> fc;
      std::vector<Outcome> obs;
      for (int id : test.match_ids) {
        const AugmentedMatch& am = ds.matches[id];
        auto it = am.record.odds.find(bk);
        if (it == am.record.odds.end()) continue;
        try {
          const OddsTriple inv = invert_decimal_odds(it->second);
          fc.push_back(method == ProbMethod::Basic
                           ? basic_normalize(inv)
                           : estimate_shin_z(inv).probs);
        } catch (const Error&) {
          continue;
        }
        obs.push_back(observed_outcome(am.record));
      }
      if (fc.empty()) continue;
      const double pbar = average_correct_probability(fc, obs);
      pout << to_string(method) << ":" << bk << "\t" << fmt(pbar) << "\t"
           << fc.size() << "\n";
      pbar_sum += pbar;
      ++pbar_n;
    }
    if (pbar_n > 0)
      pout << to_string(method) << ":avg\t" << fmt(pbar_sum / pbar_n) << "\t"
           << pbar_n << "\n";
  }
  persist_config(cfg);
  std::cerr << "bet: reports written\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "scoremix: odds-aware hierarchical Bayesian football score model"};
  app.require_subcommand(1);

  // precedence: defaults < config file < explicit flags. Flags bind
  // directly to cfg fields and CLI11 writes them only when present, so
  // loading the file before parsing gives exactly that order.
  std::string preload_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc)
      preload_path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      preload_path = a.substr(9);
  }

  // convert stands alone: it needs no run configuration
  auto* convert = app.add_subcommand(
      "convert", "convert a football-data CSV into outcome probabilities");
  std::string conv_in, conv_out, conv_method = "shin";
  convert->add_option("input", conv_in, "odds CSV file")->required();
  convert->add_option("output", conv_out, "probabilities TSV")->required();
  convert->add_option("--method", conv_method, "basic or shin");

  RunConfig cfg;
  std::string config_path;
  std::vector<std::string> overrides;
  if (!preload_path.empty()) {
    try {
      cfg = load_run_config(preload_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file");
    cmd->add_option("--data-dir", cfg.data_dir, "season CSV directory");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--league", cfg.league, "league identifier");
    cmd->add_option("--method", cfg.method, "odds transform: basic|shin");
    cmd->add_option("--test-season", cfg.test_season,
                    "0-based test season (-1 = last)");
    cmd->add_option("--iterations", cfg.sampler.n_iterations,
                    "MCMC iterations per chain");
    cmd->add_option("--burnin", cfg.sampler.n_burnin, "burn-in iterations");
    cmd->add_option("--chains", cfg.sampler.n_chains, "number of chains");
    cmd->add_option("--seed", cfg.sampler.seed, "random seed");
    cmd->add_option("--simulations", cfg.n_simulations,
                    "season simulation count");
    cmd->add_flag("--use-test-odds,!--no-use-test-odds", cfg.use_test_odds,
                  "let test-season odds inform the fit and forecasts");
    cmd->add_flag("--only-positive-ev", cfg.only_positive_ev,
                  "strategy A skips non-positive expected value bets");
    cmd->add_flag("--away-intercept", cfg.away_intercept,
                  "share the intercept with the away scoring rate");
    cmd->add_option("--set", overrides,
                    "extra key=value configuration overrides");
    return cmd;
  };

  auto* ingest = add_common(app.add_subcommand(
      "ingest", "load season CSVs and cache implicit scoring rates"));
  auto* fit = add_common(
      app.add_subcommand("fit", "sample the posterior and run diagnostics"));
  auto* predict = add_common(app.add_subcommand(
      "predict", "forecast the test season from persisted draws"));
  auto* simulate = add_common(app.add_subcommand(
      "simulate", "simulate final tables for the test season"));
  auto* ppc = add_common(app.add_subcommand(
      "ppc", "posterior predictive checks on the training data"));
  auto* bet = add_common(app.add_subcommand(
      "bet", "backtest betting strategies on the test season"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (convert->parsed())
      return cmd_convert(conv_in, conv_out, conv_method);

    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw Error("--set expects key=value, got '" + kv + "'");
      set_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }

    if (ingest->parsed()) return cmd_ingest(cfg);
    if (fit->parsed()) return cmd_fit(cfg);
    if (predict->parsed()) return cmd_predict(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (ppc->parsed()) return cmd_ppc(cfg);
    if (bet->parsed()) return cmd_bet(cfg);
  } catch (const NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NonFiniteStart& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
