#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "scoremix/data.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

using namespace scoremix;
using testsupport::TempDir;
using Catch::Approx;

namespace {

const char* kCanonical =
    "Div,Date,HomeTeam,AwayTeam,FTHG,FTAG,B365H,B365D,B365A,IWH,IWD,IWA\n"
    "E0,14/08/16,Arsenal,Liverpool,3,4,1.57,4.20,6.00,1.60,4.10,5.80\n"
    "E0,15/08/16,Chelsea,West Ham,2,1,1.50,4.30,7.00,,,\n";

}  // namespace

TEST_CASE("load_csv") {
  TempDir tmp;

  SECTION("direct field mapping") {
    const std::string path = tmp.write("s0.csv", kCanonical);
    TeamIndex teams;
    LoadStats stats;
    const auto records = load_csv(path, LeagueConfig{}, teams, 0, &stats);
    REQUIRE(records.size() == 2);
    CHECK(records[0].goals_home == 3);
    CHECK(records[0].goals_away == 4);
    CHECK(records[0].date == Date{2016, 8, 14});
    CHECK(teams.names[records[0].home_team] == "Arsenal");
    CHECK(teams.names[records[0].away_team] == "Liverpool");
    const DecimalOddsTriple& b365 = records[0].odds.at("B365");
    CHECK(b365.win == Approx(1.57));
    CHECK(b365.draw == Approx(4.20));
    CHECK(b365.loss == Approx(6.00));
    CHECK(stats.dropped_rows == 0);
  }

  SECTION("missing odds cells leave that bookmaker absent") {
    const std::string path = tmp.write("s0.csv", kCanonical);
    TeamIndex teams;
    const auto records = load_csv(path, LeagueConfig{}, teams, 0);
    CHECK(records[1].odds.count("B365") == 1);
    CHECK(records[1].odds.count("IW") == 0);
  }

  SECTION("shuffled header parses identically") {
    const std::string shuffled =
        "FTAG,AwayTeam,B365A,Date,B365H,HomeTeam,FTHG,B365D\n"
        "4,Liverpool,6.00,14/08/16,1.57,Arsenal,3,4.20\n";
    TeamIndex t1, t2;
    const auto a = load_csv(tmp.write("a.csv", kCanonical), LeagueConfig{},
                            t1, 0);
    const auto b = load_csv(tmp.write("b.csv", shuffled), LeagueConfig{},
                            t2, 0);
    CHECK(a[0].goals_home == b[0].goals_home);
    CHECK(a[0].date == b[0].date);
    CHECK(t1.names[a[0].home_team] == t2.names[b[0].home_team]);
    CHECK(a[0].odds.at("B365").win == b[0].odds.at("B365").win);
  }

  SECTION("rows with missing scores are dropped and counted") {
    const std::string content =
        "Date,HomeTeam,AwayTeam,FTHG,FTAG\n"
        "14/08/16,Arsenal,Liverpool,3,4\n"
        "20/08/16,Chelsea,Everton,,\n";
    TeamIndex teams;
    LoadStats stats;
    const auto records =
        load_csv(tmp.write("c.csv", content), LeagueConfig{}, teams, 0,
                 &stats);
    CHECK(records.size() == 1);
    CHECK(stats.dropped_rows == 1);
  }

  SECTION("missing required column") {
    const std::string content = "Date,HomeTeam,AwayTeam,FTHG\n";
    CHECK_THROWS_AS(
        [&] {
          TeamIndex teams;
          return load_csv(tmp.write("h.csv", content), LeagueConfig{}, teams,
                          0);
        }(),
        MalformedHeader);
  }

  SECTION("unparseable rows carry the line number") {
    const std::string content =
        "Date,HomeTeam,AwayTeam,FTHG,FTAG\n"
        "14/08/16,Arsenal,Liverpool,3,4\n"
        "nonsense,Chelsea,Everton,x,1\n";
    TeamIndex teams;
    try {
      load_csv(tmp.write("u.csv", content), LeagueConfig{}, teams, 0);
      FAIL("expected UnparseableRow");
    } catch (const UnparseableRow& e) {
      CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
  }
}

TEST_CASE("attach_implicit_rates") {
  SECTION("cardinality preserved for valid bookmakers") {
    testsupport::SyntheticSpec spec;
    spec.n_teams = 4;
    spec.rounds = 1;
    const auto syn = testsupport::generate(spec);
    std::vector<MatchRecord> records;
    for (const auto& am : syn.dataset.matches) records.push_back(am.record);
    LoadStats stats;
    const auto augmented =
        attach_implicit_rates(records, ProbMethod::Shin, &stats);
    CHECK(stats.inversion_failures == 0);
    for (const auto& am : augmented)
      CHECK(am.implicit.size() == am.record.odds.size());
  }

  SECTION("certified inversion: rates reproduce the probabilities") {
    std::vector<MatchRecord> records(1);
    records[0].odds.emplace("B365", DecimalOddsTriple{1.57, 4.20, 6.00});
    for (ProbMethod method : {ProbMethod::Basic, ProbMethod::Shin}) {
      const auto augmented = attach_implicit_rates(records, method);
      const RatePair r = augmented[0].implicit.at("B365");
      const OddsTriple inv = invert_decimal_odds(records[0].odds.at("B365"));
      const ProbTriple want = method == ProbMethod::Basic
                                  ? basic_normalize(inv)
                                  : estimate_shin_z(inv).probs;
      const ProbTriple got = three_way_probs(r);
      CHECK(got.win == Approx(want.win).margin(1e-5));
      CHECK(got.draw == Approx(want.draw).margin(1e-5));
    }
  }

  SECTION("methods give different rates") {
    std::vector<MatchRecord> records(1);
    records[0].odds.emplace("B365", DecimalOddsTriple{1.30, 5.0, 11.0});
    const auto basic = attach_implicit_rates(records, ProbMethod::Basic);
    const auto shin = attach_implicit_rates(records, ProbMethod::Shin);
    CHECK(basic[0].implicit.at("B365").home !=
          shin[0].implicit.at("B365").home);
  }

  SECTION("failures are tallied, match kept") {
    std::vector<MatchRecord> records(1);
    // corrupt quote: decimal odd at 1.0
    records[0].odds.emplace("B365", DecimalOddsTriple{1.0, 4.0, 5.0});
    // unreachable: draw probability below the rate-cap minimum
    records[0].odds.emplace(
        "BW", DecimalOddsTriple{1.0 / (1.05 * 0.475), 1.0 / (1.05 * 0.05),
                                1.0 / (1.05 * 0.475)});
    records[0].odds.emplace("IW", DecimalOddsTriple{1.57, 4.2, 6.0});
    LoadStats stats;
    const auto augmented =
        attach_implicit_rates(records, ProbMethod::Basic, &stats);
    REQUIRE(augmented.size() == 1);
    CHECK(stats.inversion_failures == 2);
    CHECK(augmented[0].implicit.size() == 1);
    CHECK(augmented[0].implicit.count("IW") == 1);
  }
}

TEST_CASE("split_by_season") {
  testsupport::SyntheticSpec spec;
  spec.n_teams = 4;
  spec.n_seasons = 10;
  spec.rounds = 1;
  const auto syn = testsupport::generate(spec);
  const Dataset& ds = syn.dataset;
  const int per_season = 12;

  SECTION("last season held out leaves nine training seasons") {
    const auto [train, test] = split_by_season(ds, 9);
    CHECK(train.size() == 9 * per_season);
    CHECK(test.size() == per_season);
    for (int id : train.match_ids)
      CHECK(ds.matches[id].record.season < 9);
  }
  SECTION("middle season excludes later seasons entirely") {
    const auto [train, test] = split_by_season(ds, 4);
    CHECK(train.size() == 4 * per_season);
    CHECK(test.size() == per_season);
    for (int id : train.match_ids)
      CHECK(ds.matches[id].record.season < 4);
  }
  SECTION("first season as test is an error") {
    CHECK_THROWS_AS(split_by_season(ds, 0), EmptyTrain);
  }
  SECTION("unknown season") {
    CHECK_THROWS_AS(split_by_season(ds, 10), UnknownSeason);
    CHECK_THROWS_AS(split_by_season(ds, -1), UnknownSeason);
  }
}

TEST_CASE("team index is a bijection") {
  TeamIndex teams;
  const int a = teams.id_for("Arsenal");
  const int b = teams.id_for("Burnley");
  CHECK(teams.id_for("Arsenal") == a);
  CHECK(a != b);
  CHECK(teams.names[a] == "Arsenal");
  CHECK(teams.lookup("Burnley") == b);
  CHECK(teams.lookup("Chelsea") == -1);
  for (int i = 0; i < teams.size(); ++i)
    CHECK(teams.lookup(teams.names[i]) == i);
}

TEST_CASE("dataset loading is deterministic and round-trips") {
  TempDir tmp;
  testsupport::SyntheticSpec spec;
  spec.n_teams = 4;
  spec.n_seasons = 2;
  spec.rounds = 1;
  spec.seed = 11;
  const auto files = testsupport::write_csvs(tmp.dir() + "/csv", spec);

  const Dataset first = load_league(files, LeagueConfig{}, ProbMethod::Shin);
  const Dataset second = load_league(files, LeagueConfig{}, ProbMethod::Shin);

  const std::string f1 = tmp.file("first.smx");
  const std::string f2 = tmp.file("second.smx");
  save_dataset(f1, first);
  save_dataset(f2, second);
  CHECK(testsupport::slurp(f1) == testsupport::slurp(f2));
  CHECK(!testsupport::slurp(f1).empty());

  // file round trip reproduces the file byte for byte
  const Dataset reloaded = load_dataset(f1);
  const std::string f3 = tmp.file("third.smx");
  save_dataset(f3, reloaded);
  CHECK(testsupport::slurp(f1) == testsupport::slurp(f3));

  CHECK(reloaded.n_seasons == first.n_seasons);
  CHECK(reloaded.n_teams() == first.n_teams());
  REQUIRE(reloaded.matches.size() == first.matches.size());
  CHECK(reloaded.matches[5].record.goals_home ==
        first.matches[5].record.goals_home);

  SECTION("every attached rate reproduces its source probabilities") {
    for (const AugmentedMatch& am : first.matches) {
      for (const auto& [bk, rate] : am.implicit) {
        const OddsTriple inv = invert_decimal_odds(am.record.odds.at(bk));
        const ProbTriple want = estimate_shin_z(inv).probs;
        const ProbTriple got = three_way_probs(rate);
        CHECK(std::abs(got.win - want.win) < 1e-5);
        CHECK(std::abs(got.draw - want.draw) < 1e-5);
        CHECK(std::abs(got.loss - want.loss) < 1e-5);
      }
    }
  }

  SECTION("version guard") {
    const std::string bad = tmp.write("bad.smx", "not-a-dataset\t9\n");
    CHECK_THROWS_AS(load_dataset(bad), BadDatasetFile);
  }
}
