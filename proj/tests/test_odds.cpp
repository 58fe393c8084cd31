#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "scoremix/odds.hpp"

using namespace scoremix;
using Catch::Approx;

namespace {

// independent bisection on g(z) = sum pi(z) - 1 over [0, 0.5], run to a
// 1e-12 grid; reimplements the Shin component from the formula directly
double shin_z_oracle(const OddsTriple& o) {
  auto g = [&](double z) {
    const double beta = o.win + o.draw + o.loss;
    double s = 0.0;
    for (double oi : {o.win, o.draw, o.loss})
      s += (std::sqrt(z * z + 4.0 * (1.0 - z) * oi * oi / beta) - z) /
           (2.0 * (1.0 - z));
    return s - 1.0;
  };
  double lo = 0.0, hi = 0.5;
  if (g(lo) <= 0.0) return 0.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OddsTriple random_overround_triple(std::mt19937& gen) {
  std::uniform_real_distribution<double> booksum_dist(1.01, 1.15);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  const double beta = booksum_dist(gen);
  double a = unit(gen), b = unit(gen), c = unit(gen);
  const double s = a + b + c;
  // scale to the booksum, keeping every entry inside (0,1)
  OddsTriple o{a / s * beta, b / s * beta, c / s * beta};
  if (o.win >= 1.0 || o.draw >= 1.0 || o.loss >= 1.0)
    return random_overround_triple(gen);
  return o;
}

}  // namespace

TEST_CASE("invert_decimal_odds") {
  SECTION("equal odds") {
    const OddsTriple o = invert_decimal_odds({2.0, 2.0, 2.0});
    CHECK(o.win == Approx(0.5));
    CHECK(o.draw == Approx(0.5));
    CHECK(o.loss == Approx(0.5));
  }
  SECTION("direct reciprocals") {
    const OddsTriple o = invert_decimal_odds({1.5, 4.0, 8.0});
    CHECK(o.win == Approx(2.0 / 3.0));
    CHECK(o.draw == Approx(0.25));
    CHECK(o.loss == Approx(0.125));
  }
  SECTION("boundary violation") {
    CHECK_THROWS_AS(invert_decimal_odds({1.0, 3.0, 3.0}), NonPositiveOdd);
    CHECK_THROWS_AS(invert_decimal_odds({2.0, 0.5, 3.0}), NonPositiveOdd);
  }
}

TEST_CASE("basic_normalize") {
  SECTION("already a simplex point") {
    const ProbTriple p = basic_normalize({1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK(p.win == Approx(1.0 / 3));
    CHECK(p.sum() == Approx(1.0).epsilon(1e-12));
  }
  SECTION("hand computation, booksum 1.10") {
    const ProbTriple p = basic_normalize({0.5, 0.35, 0.25});
    CHECK(p.win == Approx(0.454545).margin(1e-6));
    CHECK(p.draw == Approx(0.318182).margin(1e-6));
    CHECK(p.loss == Approx(0.227273).margin(1e-6));
  }
  SECTION("hand computation, booksum 1.20") {
    const ProbTriple p = basic_normalize({0.9, 0.2, 0.1});
    CHECK(p.win == Approx(0.75).margin(1e-6));
    CHECK(p.draw == Approx(0.166667).margin(1e-6));
    CHECK(p.loss == Approx(0.083333).margin(1e-6));
  }
  SECTION("degenerate input") {
    CHECK_THROWS_AS(basic_normalize({0.0, 0.0, 0.0}), DegenerateOdds);
  }
}

TEST_CASE("shin_probabilities") {
  SECTION("z=0 on a fair book returns the inverse odds") {
    const ProbTriple p = shin_probabilities({0.5, 0.3, 0.2}, 0.0);
    CHECK(p.win == Approx(0.5).margin(1e-12));
    CHECK(p.draw == Approx(0.3).margin(1e-12));
    CHECK(p.loss == Approx(0.2).margin(1e-12));
  }
  SECTION("z=0 equals o_i / sqrt(booksum)") {
    const ProbTriple p = shin_probabilities({0.5, 0.35, 0.25}, 0.0);
    CHECK(p.win == Approx(0.476731).margin(1e-6));
    CHECK(p.draw == Approx(0.333712).margin(1e-6));
    CHECK(p.loss == Approx(0.238366).margin(1e-6));
  }
  SECTION("symmetry in identical entries") {
    for (double z : {0.0, 0.02, 0.1, 0.3}) {
      const ProbTriple p = shin_probabilities({0.4, 0.4, 0.4}, z);
      CHECK(p.win == Approx(p.draw).epsilon(1e-14));
      CHECK(p.draw == Approx(p.loss).epsilon(1e-14));
    }
  }
  SECTION("rate outside [0,1) rejected") {
    CHECK_THROWS_AS(shin_probabilities({0.5, 0.3, 0.3}, -0.01), InvalidRate);
    CHECK_THROWS_AS(shin_probabilities({0.5, 0.3, 0.3}, 1.0), InvalidRate);
  }
  SECTION("closed form at z=0 for random triples") {
    std::mt19937 gen(7);
    for (int i = 0; i < 200; ++i) {
      const OddsTriple o = random_overround_triple(gen);
      const double root = std::sqrt(o.booksum());
      const ProbTriple p = shin_probabilities(o, 0.0);
      CHECK(p.win == Approx(o.win / root).margin(1e-12));
      CHECK(p.draw == Approx(o.draw / root).margin(1e-12));
      CHECK(p.loss == Approx(o.loss / root).margin(1e-12));
    }
  }
}

TEST_CASE("estimate_shin_z") {
  SECTION("booksum 1 needs no correction") {
    const ShinResult r = estimate_shin_z({0.5, 0.3, 0.2});
    CHECK(r.z == 0.0);
    CHECK_FALSE(r.fallback);
    CHECK(r.probs.win == Approx(0.5).margin(1e-10));
    CHECK(r.probs.draw == Approx(0.3).margin(1e-10));
    CHECK(r.probs.loss == Approx(0.2).margin(1e-10));
  }
  SECTION("overround triple against the bisection oracle") {
    const OddsTriple o{0.5, 0.35, 0.25};
    const ShinResult r = estimate_shin_z(o);
    CHECK(r.z == Approx(shin_z_oracle(o)).margin(1e-9));
    CHECK(r.z > 0.0);
    CHECK(r.residual <= 1e-10);
    CHECK(r.probs.sum() == Approx(1.0).epsilon(1e-14));
  }
  SECTION("symmetric entries give equal probabilities") {
    const ShinResult r = estimate_shin_z({0.4, 0.4, 0.4});
    CHECK(r.probs.win == Approx(1.0 / 3).epsilon(1e-12));
    CHECK(r.probs.draw == Approx(1.0 / 3).epsilon(1e-12));
    CHECK(r.probs.loss == Approx(1.0 / 3).epsilon(1e-12));
    CHECK(r.residual <= 1e-10);
  }
  SECTION("sub-fair book falls back to basic normalization") {
    const OddsTriple o{0.4, 0.3, 0.2};
    const ShinResult r = estimate_shin_z(o);
    CHECK(r.fallback);
    CHECK(r.z == 0.0);
    const ProbTriple b = basic_normalize(o);
    CHECK(r.probs.win == Approx(b.win).epsilon(1e-14));
  }
}

TEST_CASE("odds invariants on a random corpus") {
  std::mt19937 gen(2024);
  int shin_favourite_boost = 0;
  int draw_depressed = 0;
  int favourite_heavy = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const OddsTriple o = random_overround_triple(gen);
    const ProbTriple basic = basic_normalize(o);
    CHECK(std::abs(basic.sum() - 1.0) < 1e-12);

    // argmax invariance of the basic normalization
    const bool win_is_max = o.win >= o.draw && o.win >= o.loss;
    if (win_is_max) CHECK(basic.win >= std::max(basic.draw, basic.loss));

    const ShinResult shin = estimate_shin_z(o);
    REQUIRE_FALSE(shin.fallback);
    CHECK(shin.residual <= 1e-10);
    CHECK(shin.z >= 0.0);
    CHECK(shin.z < 0.5);

    // the largest inverse odd should get at least the basic probability
    double omax = std::max({o.win, o.draw, o.loss});
    double shin_at_max, basic_at_max;
    if (omax == o.win) {
      shin_at_max = shin.probs.win;
      basic_at_max = basic.win;
    } else if (omax == o.draw) {
      shin_at_max = shin.probs.draw;
      basic_at_max = basic.draw;
    } else {
      shin_at_max = shin.probs.loss;
      basic_at_max = basic.loss;
    }
    if (shin_at_max >= basic_at_max - 1e-9) ++shin_favourite_boost;

    // favourite-heavy books: draw entry depressed relative to basic
    if (std::max(o.win, o.loss) > 1.8 * o.draw) {
      ++favourite_heavy;
      if (shin.probs.draw <= basic.draw + 1e-12) ++draw_depressed;
    }
  }
  // empirical regularity, tested as a corpus statistic
  CHECK(shin_favourite_boost >= n * 95 / 100);
  REQUIRE(favourite_heavy > 50);
  CHECK(draw_depressed >= favourite_heavy * 95 / 100);
}
