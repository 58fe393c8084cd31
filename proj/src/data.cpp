#include "scoremix/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace scoremix {

std::string to_string(ProbMethod m) {
  return m == ProbMethod::Basic ? "basic" : "shin";
}

ProbMethod prob_method_from_string(const std::string& s) {
  if (s == "basic") return ProbMethod::Basic;
  if (s == "shin") return ProbMethod::Shin;
  throw Error("unknown probability method '" + s + "'");
}

int TeamIndex::id_for(const std::string& name) {
  auto [it, inserted] = ids.try_emplace(name, static_cast<int>(names.size()));
  if (inserted) names.push_back(name);
  return it->second;
}

int TeamIndex::lookup(const std::string& name) const {
  auto it = ids.find(name);
  return it == ids.end() ? -1 : it->second;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_int(const std::string& s, int& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) return false;
  out = static_cast<int>(v);
  return true;
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

// day-first: dd/mm/yy or dd/mm/yyyy
bool parse_date(const std::string& s, Date& out) {
  int d = 0, m = 0, y = 0;
  if (std::sscanf(trim(s).c_str(), "%d/%d/%d", &d, &m, &y) != 3) return false;
  if (y < 100) y += (y >= 70) ? 1900 : 2000;
  if (m < 1 || m > 12 || d < 1 || d > 31) return false;
  out = {y, m, d};
  return true;
}

}  // namespace

std::vector<MatchRecord> load_csv(const std::string& path,
                                  const LeagueConfig& config,
                                  TeamIndex& teams, int season,
                                  LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw MalformedHeader(path + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);

  std::map<std::string, int> col;
  for (int i = 0; i < static_cast<int>(header.size()); ++i)
    col.emplace(trim(header[i]), i);

  for (const char* required : {"Date", "HomeTeam", "AwayTeam", "FTHG", "FTAG"})
    if (!col.count(required))
      throw MalformedHeader(path + ": missing column " +
                            std::string(required));

  auto cell = [&](const std::vector<std::string>& cells,
                  const std::string& name) -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= static_cast<int>(cells.size()))
      return "";
    return cells[it->second];
  };

  std::vector<MatchRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() ||
        std::all_of(line.begin(), line.end(),
                    [](char c) { return c == ',' || c == '\r'; }))
      continue;
    const std::vector<std::string> cells = split_csv_line(line);

    const std::string home = trim(cell(cells, "HomeTeam"));
    const std::string away = trim(cell(cells, "AwayTeam"));
    if (home.empty() || away.empty())
      throw UnparseableRow(path + ":" + std::to_string(line_no) +
                           ": missing team name");

    int gh = 0, ga = 0;
    const std::string raw_gh = cell(cells, "FTHG");
    const std::string raw_ga = cell(cells, "FTAG");
    if (trim(raw_gh).empty() || trim(raw_ga).empty()) {
      if (stats) ++stats->dropped_rows;
      continue;
    }
    if (!parse_int(raw_gh, gh) || !parse_int(raw_ga, ga) || gh < 0 || ga < 0)
      throw UnparseableRow(path + ":" + std::to_string(line_no) +
                           ": bad score");

    MatchRecord rec;
    rec.season = season;
    if (!parse_date(cell(cells, "Date"), rec.date))
      throw UnparseableRow(path + ":" + std::to_string(line_no) +
                           ": bad date '" + cell(cells, "Date") + "'");
    rec.home_team = teams.id_for(home);
    rec.away_team = teams.id_for(away);
    if (rec.home_team == rec.away_team)
      throw UnparseableRow(path + ":" + std::to_string(line_no) +
                           ": team plays itself");
    rec.goals_home = gh;
    rec.goals_away = ga;

    for (const std::string& bk : config.bookmakers) {
      DecimalOddsTriple d;
      if (parse_double(cell(cells, bk + "H"), d.win) &&
          parse_double(cell(cells, bk + "D"), d.draw) &&
          parse_double(cell(cells, bk + "A"), d.loss)) {
        rec.odds.emplace(bk, d);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<AugmentedMatch> attach_implicit_rates(
    const std::vector<MatchRecord>& records, ProbMethod method,
    LoadStats* stats) {
  std::vector<AugmentedMatch> out;
  out.reserve(records.size());
  for (const MatchRecord& rec : records) {
    AugmentedMatch am;
    am.record = rec;
    am.prob_method = method;
    for (const auto& [bk, decimal] : rec.odds) {
      try {
        const OddsTriple inv = invert_decimal_odds(decimal);
        const ProbTriple probs = method == ProbMethod::Basic
                                     ? basic_normalize(inv)
                                     : estimate_shin_z(inv).probs;
        am.implicit.emplace(bk, implicit_rates(probs));
      } catch (const Error&) {
        if (stats) ++stats->inversion_failures;
      }
    }
    out.push_back(std::move(am));
  }
  return out;
}

Dataset load_league(const std::vector<std::string>& season_files,
                    const LeagueConfig& config, ProbMethod method) {
  Dataset ds;
  ds.config = config;
  ds.method = method;
  ds.n_seasons = static_cast<int>(season_files.size());
  std::vector<MatchRecord> all;
  for (int s = 0; s < ds.n_seasons; ++s) {
    auto recs = load_csv(season_files[s], config, ds.teams, s, &ds.stats);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  ds.matches = attach_implicit_rates(all, method, &ds.stats);
  return ds;
}

std::pair<DatasetView, DatasetView> split_by_season(const Dataset& dataset,
                                                    int test_season) {
  if (test_season < 0 || test_season >= dataset.n_seasons)
    throw UnknownSeason("season " + std::to_string(test_season) +
                        " not in dataset");
  DatasetView train{&dataset, {}}, test{&dataset, {}};
  for (int i = 0; i < static_cast<int>(dataset.matches.size()); ++i) {
    const int s = dataset.matches[i].record.season;
    if (s < test_season)
      train.match_ids.push_back(i);
    else if (s == test_season)
      test.match_ids.push_back(i);
  }
  if (train.match_ids.empty())
    throw EmptyTrain("no seasons precede season " +
                     std::to_string(test_season));
  return {std::move(train), std::move(test)};
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "scoremix-dataset\t1\n";
  out << "league\t" << ds.config.league << "\n";
  out << "method\t" << to_string(ds.method) << "\n";
  out << "seasons\t" << ds.n_seasons << "\n";
  out << "dropped\t" << ds.stats.dropped_rows << "\n";
  out << "failures\t" << ds.stats.inversion_failures << "\n";
  out << "bookmakers";
  for (const auto& bk : ds.config.bookmakers) out << "\t" << bk;
  out << "\n";
  for (int t = 0; t < ds.teams.size(); ++t)
    out << "team\t" << t << "\t" << ds.teams.names[t] << "\n";
  for (std::size_t i = 0; i < ds.matches.size(); ++i) {
    const AugmentedMatch& m = ds.matches[i];
    const MatchRecord& r = m.record;
    char date[16];
    std::snprintf(date, sizeof(date), "%04d-%02d-%02d", r.date.year,
                  r.date.month, r.date.day);
    out << "match\t" << i << "\t" << r.season << "\t" << date << "\t"
        << r.home_team << "\t" << r.away_team << "\t" << r.goals_home << "\t"
        << r.goals_away << "\n";
    for (const auto& [bk, d] : r.odds) {
      out << "odds\t" << i << "\t" << bk << "\t" << fmt(d.win) << "\t"
          << fmt(d.draw) << "\t" << fmt(d.loss);
      auto it = m.implicit.find(bk);
      if (it != m.implicit.end())
        out << "\t" << fmt(it->second.home) << "\t" << fmt(it->second.away);
      else
        out << "\t-\t-";
      out << "\n";
    }
    // implicit rates may exist without quoted odds (synthetic data)
    for (const auto& [bk, rate] : m.implicit) {
      if (!r.odds.count(bk))
        out << "rates\t" << i << "\t" << bk << "\t" << fmt(rate.home) << "\t"
            << fmt(rate.away) << "\n";
    }
  }
  out << "end\n";
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 1) {
    // tab-separated; re-read below
  }
  auto fields = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : l) {
      if (c == '\t') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r' && c != '\n') {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    return out;
  };

  std::vector<std::string> f = fields(line);
  if (f.size() != 2 || f[0] != "scoremix-dataset" || f[1] != "1")
    throw BadDatasetFile(path + ": not a scoremix dataset (v1)");

  Dataset ds;
  bool saw_end = false;
  while (std::getline(in, line)) {
    f = fields(line);
    if (f.empty() || f[0].empty()) continue;
    const std::string& tag = f[0];
    if (tag == "league") {
      ds.config.league = f.at(1);
    } else if (tag == "method") {
      ds.method = prob_method_from_string(f.at(1));
    } else if (tag == "seasons") {
      ds.n_seasons = std::stoi(f.at(1));
    } else if (tag == "dropped") {
      ds.stats.dropped_rows = std::stoi(f.at(1));
    } else if (tag == "failures") {
      ds.stats.inversion_failures = std::stoi(f.at(1));
    } else if (tag == "bookmakers") {
      ds.config.bookmakers.assign(f.begin() + 1, f.end());
    } else if (tag == "team") {
      const int id = std::stoi(f.at(1));
      if (id != ds.teams.id_for(f.at(2)))
        throw BadDatasetFile(path + ": team ids out of order");
    } else if (tag == "match") {
      if (f.size() < 8) throw BadDatasetFile(path + ": short match line");
      AugmentedMatch am;
      am.prob_method = ds.method;
      MatchRecord& r = am.record;
      r.season = std::stoi(f[2]);
      std::sscanf(f[3].c_str(), "%d-%d-%d", &r.date.year, &r.date.month,
                  &r.date.day);
      r.home_team = std::stoi(f[4]);
      r.away_team = std::stoi(f[5]);
      r.goals_home = std::stoi(f[6]);
      r.goals_away = std::stoi(f[7]);
      if (std::stoul(f[1]) != ds.matches.size())
        throw BadDatasetFile(path + ": match ids out of order");
      ds.matches.push_back(std::move(am));
    } else if (tag == "odds") {
      if (f.size() < 8) throw BadDatasetFile(path + ": short odds line");
      AugmentedMatch& am = ds.matches.at(std::stoul(f[1]));
      DecimalOddsTriple d{std::stod(f[3]), std::stod(f[4]), std::stod(f[5])};
      am.record.odds.emplace(f[2], d);
      if (f[6] != "-")
        am.implicit.emplace(f[2], RatePair{std::stod(f[6]), std::stod(f[7])});
    } else if (tag == "rates") {
      if (f.size() < 5) throw BadDatasetFile(path + ": short rates line");
      AugmentedMatch& am = ds.matches.at(std::stoul(f[1]));
      am.implicit.emplace(f[2], RatePair{std::stod(f[3]), std::stod(f[4])});
    } else if (tag == "end") {
      saw_end = true;
      break;
    } else {
      throw BadDatasetFile(path + ": unknown tag '" + tag + "'");
    }
  }
  if (!saw_end) throw BadDatasetFile(path + ": truncated file");
  return ds;
}

}  // namespace scoremix
