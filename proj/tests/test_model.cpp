#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "scoremix/dist.hpp"
#include "scoremix/model.hpp"
#include "support/synthetic.hpp"

using namespace scoremix;
using Catch::Approx;

namespace {

FitData fit_for_all(const Dataset& ds, bool away_intercept = false) {
  DatasetView all{&ds, {}};
  for (int i = 0; i < static_cast<int>(ds.matches.size()); ++i)
    all.match_ids.push_back(i);
  return FitData::build(ds, all, nullptr, away_intercept);
}

// canonical zero-sum representation for a parameter set produced outside
// the model (e.g. the synthetic truth)
void canonicalize(ModelParameters& p) {
  for (int s = 0; s < p.att.cols(); ++s) {
    set_effect_column(p.att, s, free_from_column(p.att, s));
    set_effect_column(p.def, s, free_from_column(p.def, s));
  }
}

// independent truncated-normal log-density: normal pdf over a numerically
// integrated normalizing constant (composite Simpson on [0, mean+12sd])
double trunc_normal_oracle(double x, double mean, double variance) {
  const double sd = std::sqrt(variance);
  auto pdf = [&](double u) {
    return std::exp(-0.5 * (u - mean) * (u - mean) / variance) /
           (sd * std::sqrt(2.0 * M_PI));
  };
  const double hi = mean + 12.0 * sd;
  const int n = 40000;  // even
  const double h = hi / n;
  double integral = pdf(0.0) + pdf(hi);
  for (int i = 1; i < n; ++i)
    integral += pdf(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  integral *= h / 3.0;
  return std::log(pdf(x)) - std::log(integral);
}

}  // namespace

TEST_CASE("score_rates") {
  ModelParameters p = ModelParameters::zeros(4, 2, 0);
  FitMatch m;
  m.home = 0;
  m.away = 1;
  m.season = 0;

  SECTION("all parameters zero") {
    const RatePair r = score_rates(p, m);
    CHECK(r.home == Approx(1.0));
    CHECK(r.away == Approx(1.0));
  }
  SECTION("direct exponentiation") {
    p.mu = 0.2;
    p.att(0, 0) = 0.1;
    p.def(1, 0) = -0.1;
    const RatePair r = score_rates(p, m);
    CHECK(r.home == Approx(std::exp(0.2)));
    CHECK(r.away == Approx(1.0));
  }
  SECTION("relabeling symmetry at mu = 0") {
    p.att(0, 0) = 0.3;
    p.def(0, 0) = -0.2;
    p.att(1, 0) = -0.1;
    p.def(1, 0) = 0.25;
    const RatePair r = score_rates(p, m);
    FitMatch swapped = m;
    std::swap(swapped.home, swapped.away);
    const RatePair q = score_rates(p, swapped);
    CHECK(r.home == Approx(q.away));
    CHECK(r.away == Approx(q.home));
  }
  SECTION("away intercept switch") {
    p.mu = 0.4;
    const RatePair off = score_rates(p, m, false);
    const RatePair on = score_rates(p, m, true);
    CHECK(off.away == Approx(1.0));
    CHECK(on.away == Approx(std::exp(0.4)));
    CHECK(on.home == Approx(off.home));
  }
}

TEST_CASE("mixture_rates") {
  testsupport::SyntheticSpec spec;
  spec.n_teams = 3;
  spec.n_seasons = 1;
  spec.rounds = 1;
  const auto syn = testsupport::generate(spec);
  const FitData fit = fit_for_all(syn.dataset);
  ModelParameters p = syn.truth;
  canonicalize(p);

  SECTION("boundaries of the convex combination") {
    p.p_home.setConstant(1.0);
    p.p_away.setConstant(1.0);
    const RatePair theta = score_rates(p, fit.matches[0]);
    const RatePair g1 = mixture_rates(p, fit, 0);
    CHECK(g1.home == Approx(theta.home));
    CHECK(g1.away == Approx(theta.away));

    p.p_home.setConstant(0.0);
    p.p_away.setConstant(0.0);
    const RatePair g0 = mixture_rates(p, fit, 0);
    CHECK(g0.home == Approx(p.lambda_home[0]));
    CHECK(g0.away == Approx(p.lambda_away[0]));
  }
  SECTION("midpoint") {
    p.p_home[0] = 0.5;
    p.lambda_home[0] = 1.0;
    p.att.setZero();
    p.def.setZero();
    p.mu = std::log(2.0);
    const RatePair g = mixture_rates(p, fit, 0);
    CHECK(g.home == Approx(1.5));
  }
}

TEST_CASE("log_likelihood_scores") {
  SECTION("empty dataset sums to zero") {
    Dataset ds;
    ds.n_seasons = 1;
    ds.teams.id_for("A");
    ds.teams.id_for("B");
    DatasetView empty{&ds, {}};
    const FitData fit = FitData::build(ds, empty);
    const ModelParameters p = ModelParameters::zeros(2, 1, 0);
    CHECK(log_likelihood_scores(p, fit) == 0.0);
  }

  SECTION("single scoreless match at unit rates") {
    Dataset ds;
    ds.n_seasons = 1;
    ds.teams.id_for("A");
    ds.teams.id_for("B");
    AugmentedMatch am;
    am.record.home_team = 0;
    am.record.away_team = 1;
    am.record.goals_home = 0;
    am.record.goals_away = 0;
    ds.matches.push_back(am);
    DatasetView all{&ds, {0}};
    const FitData fit = FitData::build(ds, all);
    ModelParameters p = ModelParameters::zeros(2, 1, 1);
    p.p_home.setConstant(1.0);
    p.p_away.setConstant(1.0);
    CHECK(log_likelihood_scores(p, fit) == Approx(-2.0).epsilon(1e-12));
  }

  SECTION("matches an elementwise Poisson oracle") {
    testsupport::SyntheticSpec spec;
    spec.n_teams = 5;
    spec.rounds = 1;
    spec.seed = 3;
    const auto syn = testsupport::generate(spec);
    const FitData fit = fit_for_all(syn.dataset);
    ModelParameters p = syn.truth;
    canonicalize(p);

    long double oracle = 0.0L;
    for (int i = 0; i < fit.n_matches(); ++i) {
      const FitMatch& m = fit.matches[i];
      const RatePair g = mixture_rates(p, fit, i);
      auto logpois = [](int k, double rate) {
        long double lp = -rate + k * std::log(rate);
        for (int j = 2; j <= k; ++j) lp -= std::log(static_cast<double>(j));
        return lp;
      };
      oracle += logpois(m.goals_home, g.home) + logpois(m.goals_away, g.away);
    }
    CHECK(log_likelihood_scores(p, fit) ==
          Approx(static_cast<double>(oracle)).margin(1e-10));
  }
}

TEST_CASE("log_likelihood_bookmakers") {
  SECTION("no bookmakers sums to zero") {
    Dataset ds;
    ds.n_seasons = 1;
    ds.teams.id_for("A");
    ds.teams.id_for("B");
    AugmentedMatch am;
    am.record.home_team = 0;
    am.record.away_team = 1;
    ds.matches.push_back(am);
    DatasetView all{&ds, {0}};
    const FitData fit = FitData::build(ds, all);
    const ModelParameters p = ModelParameters::zeros(2, 1, 1);
    CHECK(log_likelihood_bookmakers(p, fit) == 0.0);
  }

  SECTION("normal mode with negligible truncation") {
    // theta_hat at lambda with lambda/tau huge: density is the plain
    // normal peak 1/(tau sqrt(2 pi))
    FitData fit;
    fit.n_teams = 2;
    fit.n_seasons = 1;
    FitMatch m;
    m.scores_observed = false;
    m.n_bookmakers = 1;
    m.sum_home = 5.0;
    m.sumsq_home = 25.0;
    m.sum_away = 5.0;
    m.sumsq_away = 25.0;
    fit.matches.push_back(m);
    ModelParameters p = ModelParameters::zeros(2, 1, 1);
    p.lambda_home[0] = 5.0;
    p.lambda_away[0] = 5.0;
    p.tau1 = p.tau2 = 0.1;
    const double expect = 2.0 * std::log(1.0 / (0.1 * std::sqrt(2 * M_PI)));
    CHECK(log_likelihood_bookmakers(p, fit) ==
          Approx(expect).epsilon(1e-12));
  }

  SECTION("matches the quadrature oracle") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> lam(0.2, 3.0);
    std::uniform_real_distribution<double> rate(0.1, 3.5);
    std::uniform_real_distribution<double> tau(0.1, 1.5);
    for (int trial = 0; trial < 25; ++trial) {
      FitData fit;
      fit.n_teams = 2;
      fit.n_seasons = 1;
      FitMatch m;
      m.scores_observed = false;
      m.n_bookmakers = 2;
      const double x1 = rate(gen), x2 = rate(gen);
      const double y1 = rate(gen), y2 = rate(gen);
      m.sum_home = x1 + x2;
      m.sumsq_home = x1 * x1 + x2 * x2;
      m.sum_away = y1 + y2;
      m.sumsq_away = y1 * y1 + y2 * y2;
      fit.matches.push_back(m);

      ModelParameters p = ModelParameters::zeros(2, 1, 1);
      p.lambda_home[0] = lam(gen);
      p.lambda_away[0] = lam(gen);
      p.tau1 = tau(gen);
      p.tau2 = tau(gen);

      const double oracle =
          trunc_normal_oracle(x1, p.lambda_home[0], p.tau1 * p.tau1) +
          trunc_normal_oracle(x2, p.lambda_home[0], p.tau1 * p.tau1) +
          trunc_normal_oracle(y1, p.lambda_away[0], p.tau2 * p.tau2) +
          trunc_normal_oracle(y2, p.lambda_away[0], p.tau2 * p.tau2);
      CHECK(log_likelihood_bookmakers(p, fit) ==
            Approx(oracle).margin(1e-8));
    }
  }
}

TEST_CASE("log_prior") {
  PriorConfig priors;

  SECTION("zero effects contribute closed-form normal terms") {
    ModelParameters p = ModelParameters::zeros(3, 2, 0);
    p.sigma_att = p.sigma_def = 0.7;
    const double lp = log_prior(p, priors);
    // effects: 3 teams x 2 seasons x 2 kinds, all N(0; 0, sigma^2)
    const double effect_terms =
        12.0 * normal_log_pdf(0.0, 0.0, 0.49);
    const double hyper_terms =
        3.0 * normal_log_pdf(0.0, 0.0, 10.0) +
        2.0 * half_cauchy_log_pdf(0.7, 2.5) +
        2.0 * trunc_normal_log_pdf(1.0, 0.0, 100.0) +
        2.0 * half_cauchy_log_pdf(0.5, 2.5);
    CHECK(lp == Approx(effect_terms + hyper_terms).epsilon(1e-12));
  }

  SECTION("half-Cauchy at its scale") {
    CHECK(half_cauchy_log_pdf(2.5, 2.5) ==
          Approx(std::log(2.0 / (M_PI * 2.5 * 2.0))).epsilon(1e-13));
  }

  SECTION("uniform Beta contributes nothing and is finite at 0 and 1") {
    ModelParameters p = ModelParameters::zeros(2, 1, 1);
    const double mid = log_prior(p, priors);
    p.p_home[0] = 0.0;
    p.p_away[0] = 1.0;
    const double edge = log_prior(p, priors);
    CHECK(std::isfinite(edge));
    CHECK(edge == Approx(mid).epsilon(1e-12));
  }

  SECTION("non-positive scales are rejected") {
    ModelParameters p = ModelParameters::zeros(2, 1, 0);
    p.sigma_att = 0.0;
    CHECK(log_prior(p, priors) ==
          -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("log_posterior") {
  testsupport::SyntheticSpec spec;
  spec.n_teams = 4;
  spec.rounds = 1;
  spec.seed = 17;
  const auto syn = testsupport::generate(spec);
  const FitData fit = fit_for_all(syn.dataset);
  PriorConfig priors;
  ModelParameters p = syn.truth;
  canonicalize(p);

  SECTION("equals the component sum") {
    CHECK(log_posterior(p, fit, priors) ==
          Approx(log_prior(p, priors) + log_likelihood_scores(p, fit) +
                 log_likelihood_bookmakers(p, fit))
              .epsilon(1e-12));
  }

  SECTION("finite-difference gradient for mu matches the analytic form") {
    auto f = [&](double mu) {
      ModelParameters q = p;
      q.mu = mu;
      return log_posterior(q, fit, priors);
    };
    const double h = 1e-6;
    const double fd = (f(p.mu + h) - f(p.mu - h)) / (2.0 * h);

    double analytic = -p.mu / priors.hyper_mean_variance;
    for (int i = 0; i < fit.n_matches(); ++i) {
      const FitMatch& m = fit.matches[i];
      if (!m.scores_observed) continue;
      const RatePair theta = score_rates(p, m);
      const RatePair g = mixture_rates(p, fit, i);
      analytic += (m.goals_home / g.home - 1.0) * p.p_home[i] * theta.home;
    }
    CHECK(fd == Approx(analytic).epsilon(1e-5));
  }

  SECTION("finite-difference gradient for one free attack coordinate") {
    const int t = 1, season = 0;
    const int T = fit.n_teams;
    auto f = [&](double delta) {
      ModelParameters q = p;
      Eigen::VectorXd free = free_from_column(q.att, season);
      free[t] += delta;
      set_effect_column(q.att, season, free);
      return log_posterior(q, fit, priors);
    };
    const double h = 1e-6;
    const double fd = (f(h) - f(-h)) / (2.0 * h);

    // moving the free coordinate raises att(t, s) and lowers att(T-1, s)
    auto dd = [&](int team) {
      double d = 0.0;
      for (int i = 0; i < fit.n_matches(); ++i) {
        const FitMatch& m = fit.matches[i];
        if (!m.scores_observed || m.season != season) continue;
        const RatePair theta = score_rates(p, m);
        const RatePair g = mixture_rates(p, fit, i);
        if (m.home == team)
          d += (m.goals_home / g.home - 1.0) * p.p_home[i] * theta.home;
        if (m.away == team)
          d += (m.goals_away / g.away - 1.0) * p.p_away[i] * theta.away;
      }
      const double va = p.sigma_att * p.sigma_att;
      const double mean0 = season == 0 ? p.mu_att
                                       : p.mu_att + p.att(team, season - 1);
      d -= (p.att(team, season) - mean0) / va;
      if (season + 1 < fit.n_seasons)
        d += (p.att(team, season + 1) - p.mu_att - p.att(team, season)) / va;
      return d;
    };
    const double analytic = dd(t) - dd(T - 1);
    CHECK(fd == Approx(analytic).epsilon(1e-5));
  }

  SECTION("shuffling match order leaves the value unchanged to the bit") {
    const double v1 = log_posterior(p, fit, priors);

    std::vector<int> perm(fit.n_matches());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937 gen(5);
    std::shuffle(perm.begin(), perm.end(), gen);

    FitData shuffled = fit;
    ModelParameters q = p;
    for (int i = 0; i < fit.n_matches(); ++i) {
      shuffled.matches[i] = fit.matches[perm[i]];
      q.p_home[i] = p.p_home[perm[i]];
      q.p_away[i] = p.p_away[perm[i]];
      q.lambda_home[i] = p.lambda_home[perm[i]];
      q.lambda_away[i] = p.lambda_away[perm[i]];
    }
    const double v2 = log_posterior(q, shuffled, priors);
    CHECK(v1 == v2);  // bit-identical
  }

  SECTION("weight boundaries stay finite under the uniform prior") {
    ModelParameters q = p;
    q.p_home[0] = 0.0;
    q.p_away[0] = 1.0;
    CHECK(std::isfinite(log_posterior(q, fit, priors)));
  }
}

TEST_CASE("zero-sum representation") {
  SECTION("set_effect_column keeps columns at zero sum") {
    Eigen::MatrixXd effects = Eigen::MatrixXd::Zero(6, 2);
    Eigen::VectorXd free(5);
    free << 0.3, -0.7, 1.1, 0.05, -0.4;
    set_effect_column(effects, 1, free);
    CHECK(std::abs(effects.col(1).sum()) < 1e-10);
    CHECK(effects(5, 1) == Approx(-free.sum()));
    const Eigen::VectorXd back = free_from_column(effects, 1);
    CHECK(back.isApprox(free));
  }

  SECTION("shifting att against def leaves score rates unchanged") {
    testsupport::SyntheticSpec spec;
    spec.n_teams = 4;
    spec.rounds = 1;
    const auto syn = testsupport::generate(spec);
    const FitData fit = fit_for_all(syn.dataset);
    ModelParameters p = syn.truth;
    canonicalize(p);

    ModelParameters q = p;
    const double c = 0.37;
    q.att.array() += c;
    q.def.array() -= c;
    for (int i = 0; i < fit.n_matches(); ++i) {
      const RatePair a = score_rates(p, fit.matches[i]);
      const RatePair b = score_rates(q, fit.matches[i]);
      // the transformation is invisible to the likelihood: the
      // identifiability constraint is what pins it down
      CHECK(b.home / a.home == Approx(1.0).epsilon(1e-12));
      CHECK(b.away / a.away == Approx(1.0).epsilon(1e-12));
    }
  }
}
