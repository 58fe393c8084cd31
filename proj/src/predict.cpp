#include "scoremix/predict.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "scoremix/dist.hpp"
#include "scoremix/rng.hpp"
#include "scoremix/skellam.hpp"

namespace scoremix {

namespace {

void check_fixture(const ParamLayout& lay, const Fixture& fx) {
  if (fx.home < 0 || fx.home >= lay.n_teams || fx.away < 0 ||
      fx.away >= lay.n_teams)
    throw UnknownTeam("fixture references a team outside the model");
  if (fx.season < 0 || fx.season >= lay.n_seasons)
    throw UnknownTeam("fixture references a season outside the model");
}

std::map<int, int> match_positions(const ParamLayout& lay) {
  std::map<int, int> pos;
  for (int i = 0; i < lay.n_matches(); ++i) pos.emplace(lay.match_ids[i], i);
  return pos;
}

// mixed scoring rates for one fixture under one posterior draw; falls
// back to the score-model rates when the match has no sampled (p, lambda)
template <typename Row>
RatePair rates_from_row(const ParamLayout& lay, const Row& row,
                        const Fixture& fx, int match_pos) {
  const double th1 = std::exp(row[0] + row[lay.col_att(fx.home, fx.season)] +
                              row[lay.col_def(fx.away, fx.season)]);
  double away_log = row[lay.col_att(fx.away, fx.season)] +
                    row[lay.col_def(fx.home, fx.season)];
  if (lay.away_intercept) away_log += row[0];
  const double th2 = std::exp(away_log);
  if (match_pos < 0) return {th1, th2};
  const int c = lay.col_match(match_pos);
  const double p1 = row[c], p2 = row[c + 1];
  const double l1 = row[c + 2], l2 = row[c + 3];
  return {p1 * th1 + (1.0 - p1) * l1, p2 * th2 + (1.0 - p2) * l2};
}

}  // namespace

std::string to_string(PpcStatistic s) {
  switch (s) {
    case PpcStatistic::MeanGoalDiff: return "mean_goal_diff";
    case PpcStatistic::DrawFrequency: return "draw_frequency";
    case PpcStatistic::TotalGoals: return "total_goals";
    default: return "max_home_score";
  }
}

MatchForecast forecast_match(const PosteriorDraws& draws,
                             const Fixture& fixture,
                             const ForecastOptions& opts) {
  const ParamLayout& lay = draws.layout;
  check_fixture(lay, fixture);

  int match_pos = -1;
  if (opts.use_test_odds && fixture.match_id >= 0) {
    const auto pos = match_positions(lay);
    auto it = pos.find(fixture.match_id);
    if (it != pos.end()) match_pos = it->second;
  }

  const int n = opts.grid_max + 1;
  MatchForecast fc;
  fc.match_id = fixture.match_id;
  fc.grid = Eigen::MatrixXd::Zero(n, n);
  fc.used_match_params = match_pos >= 0;

  double w_acc = 0.0, d_acc = 0.0, l_acc = 0.0;
  double r1_acc = 0.0, r2_acc = 0.0;
  long used = 0;
  Eigen::VectorXd pois1(n), pois2(n);

  long index = 0;
  for (const ChainDraws& chain : draws.chains) {
    for (int r = 0; r < chain.draws.rows(); ++r, ++index) {
      if (index % opts.thin != 0) continue;
      const auto row = chain.draws.row(r);
      const RatePair g = rates_from_row(lay, row, fixture, match_pos);

      const ProbTriple tw = three_way_probs(g);
      w_acc += tw.win;
      d_acc += tw.draw;
      l_acc += tw.loss;
      r1_acc += g.home;
      r2_acc += g.away;

      for (int i = 0; i < n; ++i) {
        pois1[i] = std::exp(poisson_log_pmf(i, g.home));
        pois2[i] = std::exp(poisson_log_pmf(i, g.away));
      }
      fc.grid += pois1 * pois2.transpose();
      ++used;
    }
  }
  if (used == 0) throw MissingDraws("no retained draws to forecast from");

  const double total = w_acc + d_acc + l_acc;
  fc.probs = {w_acc / total, d_acc / total, l_acc / total};
  fc.mean_rates = {r1_acc / used, r2_acc / used};
  fc.grid /= fc.grid.sum();
  return fc;
}

ScoreReplication replicate_scores(const PosteriorDraws& draws,
                                  const FitData& fit, int thin,
                                  std::uint64_t seed) {
  const ParamLayout& lay = draws.layout;
  std::vector<int> observed;
  for (int i = 0; i < fit.n_matches(); ++i)
    if (fit.matches[i].scores_observed) observed.push_back(i);

  const int total = draws.total_retained();
  const int reps = (total + thin - 1) / thin;
  ScoreReplication rep;
  rep.home.resize(reps, static_cast<int>(observed.size()));
  rep.away.resize(reps, static_cast<int>(observed.size()));
  for (int i : observed) rep.match_ids.push_back(fit.matches[i].match_id);

  Rng rng(splitmix64(seed ^ 0x7265706c69636174ULL));
  long index = 0;
  int out_row = 0;
  for (const ChainDraws& chain : draws.chains) {
    for (int r = 0; r < chain.draws.rows(); ++r, ++index) {
      if (index % thin != 0) continue;
      const auto row = chain.draws.row(r);
      for (std::size_t k = 0; k < observed.size(); ++k) {
        const FitMatch& m = fit.matches[observed[k]];
        const Fixture fx{m.match_id, m.home, m.away, m.season};
        const RatePair g =
            rates_from_row(lay, row, fx, observed[k]);
        rep.home(out_row, static_cast<int>(k)) = rng.poisson(g.home);
        rep.away(out_row, static_cast<int>(k)) = rng.poisson(g.away);
      }
      ++out_row;
    }
  }
  return rep;
}

double ppc_statistic(PpcStatistic stat,
                     const std::vector<std::pair<int, int>>& scores) {
  if (scores.empty()) return 0.0;
  switch (stat) {
    case PpcStatistic::MeanGoalDiff: {
      double s = 0.0;
      for (auto [h, a] : scores) s += h - a;
      return s / scores.size();
    }
    case PpcStatistic::DrawFrequency: {
      int d = 0;
      for (auto [h, a] : scores) d += h == a;
      return static_cast<double>(d) / scores.size();
    }
    case PpcStatistic::TotalGoals: {
      double s = 0.0;
      for (auto [h, a] : scores) s += h + a;
      return s;
    }
    default: {
      int m = 0;
      for (auto [h, a] : scores) m = std::max(m, h);
      return m;
    }
  }
}

double bayesian_p_value(const ScoreReplication& replication,
                        const FitData& fit, PpcStatistic stat) {
  std::vector<std::pair<int, int>> observed;
  for (const FitMatch& m : fit.matches)
    if (m.scores_observed) observed.emplace_back(m.goals_home, m.goals_away);
  const double t_obs = ppc_statistic(stat, observed);

  const int reps = static_cast<int>(replication.home.rows());
  const int M = static_cast<int>(replication.home.cols());
  int exceed = 0;
  std::vector<std::pair<int, int>> scores(M);
  for (int r = 0; r < reps; ++r) {
    for (int k = 0; k < M; ++k)
      scores[k] = {replication.home(r, k), replication.away(r, k)};
    if (ppc_statistic(stat, scores) > t_obs) ++exceed;
  }
  return reps > 0 ? static_cast<double>(exceed) / reps : 0.0;
}

SeasonSimulation simulate_season(const PosteriorDraws& draws,
                                 const std::vector<Fixture>& fixtures,
                                 int n_simulations, std::uint64_t seed,
                                 const ForecastOptions& opts) {
  const ParamLayout& lay = draws.layout;
  for (const Fixture& fx : fixtures) check_fixture(lay, fx);
  const auto pos_map = match_positions(lay);

  std::vector<int> teams;
  for (const Fixture& fx : fixtures) {
    teams.push_back(fx.home);
    teams.push_back(fx.away);
  }
  std::sort(teams.begin(), teams.end());
  teams.erase(std::unique(teams.begin(), teams.end()), teams.end());
  const int T = static_cast<int>(teams.size());
  std::map<int, int> team_slot;
  for (int i = 0; i < T; ++i) team_slot.emplace(teams[i], i);

  SeasonSimulation sim;
  sim.teams = teams;
  sim.n_simulations = n_simulations;

  // a full double round-robin has every ordered pair exactly once
  std::map<std::pair<int, int>, int> pair_count;
  for (const Fixture& fx : fixtures) ++pair_count[{fx.home, fx.away}];
  sim.incomplete_fixtures =
      static_cast<int>(fixtures.size()) != T * (T - 1) ||
      std::any_of(pair_count.begin(), pair_count.end(),
                  [](const auto& kv) { return kv.second != 1; });

  std::vector<int> match_pos(fixtures.size(), -1);
  if (opts.use_test_odds) {
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
      auto it = pos_map.find(fixtures[i].match_id);
      if (it != pos_map.end()) match_pos[i] = it->second;
    }
  }

  const int total_draws = draws.total_retained();
  if (total_draws == 0) throw MissingDraws("no retained draws");

  Eigen::MatrixXd rank_counts = Eigen::MatrixXd::Zero(T, T);
  Eigen::MatrixXi points_record(n_simulations, T);
  Rng rng(splitmix64(seed ^ 0x73696d756c617465ULL));

  std::vector<int> points(T), goal_diff(T);
  std::vector<double> tiebreak(T);
  std::vector<int> order(T);
  for (int s = 0; s < n_simulations; ++s) {
    const int draw_index =
        static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(total_draws)));
    const Eigen::VectorXd row = draws.draw(draw_index);

    std::fill(points.begin(), points.end(), 0);
    std::fill(goal_diff.begin(), goal_diff.end(), 0);
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
      const RatePair g = rates_from_row(lay, row, fixtures[i], match_pos[i]);
      const int y1 = rng.poisson(g.home);
      const int y2 = rng.poisson(g.away);
      const int hs = team_slot[fixtures[i].home];
      const int as = team_slot[fixtures[i].away];
      goal_diff[hs] += y1 - y2;
      goal_diff[as] += y2 - y1;
      if (y1 > y2) {
        points[hs] += 3;
      } else if (y1 < y2) {
        points[as] += 3;
      } else {
        points[hs] += 1;
        points[as] += 1;
      }
    }

    for (int t = 0; t < T; ++t) tiebreak[t] = rng.uniform();
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (points[a] != points[b]) return points[a] > points[b];
      if (goal_diff[a] != goal_diff[b]) return goal_diff[a] > goal_diff[b];
      return tiebreak[a] > tiebreak[b];
    });
    for (int rank = 0; rank < T; ++rank) rank_counts(order[rank], rank) += 1.0;
    for (int t = 0; t < T; ++t) points_record(s, t) = points[t];
  }

  sim.rank_probs = rank_counts / static_cast<double>(n_simulations);
  sim.points_quantiles.resize(T, 3);
  sim.points_mean.resize(T);
  std::vector<double> col(n_simulations);
  auto quantile = [&](double q) {
    const double x = q * (n_simulations - 1);
    const int lo = static_cast<int>(std::floor(x));
    const int hi = std::min(lo + 1, n_simulations - 1);
    return col[lo] + (x - lo) * (col[hi] - col[lo]);
  };
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < n_simulations; ++s) col[s] = points_record(s, t);
    std::sort(col.begin(), col.end());
    sim.points_quantiles(t, 0) = quantile(0.25);
    sim.points_quantiles(t, 1) = quantile(0.5);
    sim.points_quantiles(t, 2) = quantile(0.75);
    sim.points_mean[t] =
        std::accumulate(col.begin(), col.end(), 0.0) / n_simulations;
  }
  return sim;
}

}  // namespace scoremix
