#ifndef SCOREMIX_DATA_HPP
#define SCOREMIX_DATA_HPP

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "scoremix/odds.hpp"
#include "scoremix/skellam.hpp"

namespace scoremix {

enum class ProbMethod { Basic, Shin };

std::string to_string(ProbMethod m);
ProbMethod prob_method_from_string(const std::string& s);

struct LeagueConfig {
  std::string league = "league";
  std::vector<std::string> bookmakers = {"B365", "BW", "IW", "LB",
                                         "SB",   "VC", "WH"};
};

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;
  auto operator<=>(const Date&) const = default;
};

struct MatchRecord {
  int season = 0;  // 0-based season index
  Date date;
  int home_team = -1;
  int away_team = -1;
  int goals_home = 0;
  int goals_away = 0;
  std::map<std::string, DecimalOddsTriple> odds;
};

struct AugmentedMatch {
  MatchRecord record;
  std::map<std::string, RatePair> implicit;
  ProbMethod prob_method = ProbMethod::Shin;
};

/// Dense team index; name -> id inserts on first sight, so ids follow
/// appearance order across the season files.
struct TeamIndex {
  std::vector<std::string> names;
  std::map<std::string, int> ids;

  int id_for(const std::string& name);
  int lookup(const std::string& name) const;  // -1 when absent
  int size() const { return static_cast<int>(names.size()); }
};

struct LoadStats {
  int dropped_rows = 0;        // rows without scores
  int inversion_failures = 0;  // bookmaker entries that did not invert
};

/// Parses one football-data.co.uk season file. Header-keyed, so column
/// order does not matter; odds cells may be empty.
std::vector<MatchRecord> load_csv(const std::string& path,
                                  const LeagueConfig& config,
                                  TeamIndex& teams, int season,
                                  LoadStats* stats = nullptr);

std::vector<AugmentedMatch> attach_implicit_rates(
    const std::vector<MatchRecord>& records, ProbMethod method,
    LoadStats* stats = nullptr);

struct Dataset {
  LeagueConfig config;
  ProbMethod method = ProbMethod::Shin;
  TeamIndex teams;
  int n_seasons = 0;
  std::vector<AugmentedMatch> matches;
  LoadStats stats;

  int n_teams() const { return teams.size(); }
};

/// Loads one file per season, in order, and attaches implicit rates.
Dataset load_league(const std::vector<std::string>& season_files,
                    const LeagueConfig& config, ProbMethod method);

struct DatasetView {
  const Dataset* dataset = nullptr;
  std::vector<int> match_ids;

  const AugmentedMatch& match(int i) const {
    return dataset->matches[match_ids[i]];
  }
  int size() const { return static_cast<int>(match_ids.size()); }
};

/// Train = all seasons strictly before test_season, test = exactly it.
std::pair<DatasetView, DatasetView> split_by_season(const Dataset& dataset,
                                                    int test_season);

void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);

}  // namespace scoremix

#endif
