#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "scoremix/dist.hpp"
#include "scoremix/mcmc.hpp"

namespace scoremix {

namespace {

// average ranks with ties, then map through the normal quantile
// (r - 3/8) / (N + 1/4)
std::vector<double> rank_normalize(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }

  std::vector<double> z(n);
  for (std::size_t k = 0; k < n; ++k)
    z[k] = normal_quantile((ranks[k] - 0.375) / (static_cast<double>(n) + 0.25));
  return z;
}

struct SplitStats {
  double rhat = 0.0;
  double ess = 0.0;
  bool defined = false;
};

// sequences: m split-chains of equal length n, already rank-normalized
SplitStats split_stats(const std::vector<std::vector<double>>& seqs) {
  SplitStats out;
  const int m = static_cast<int>(seqs.size());
  const int n = static_cast<int>(seqs[0].size());
  if (m < 2 || n < 4) return out;

  std::vector<double> means(m), vars(m);
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (double v : seqs[j]) s += v;
    means[j] = s / n;
    double q = 0.0;
    for (double v : seqs[j]) q += (v - means[j]) * (v - means[j]);
    vars[j] = q / (n - 1);
  }
  const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
  const double grand =
      std::accumulate(means.begin(), means.end(), 0.0) / m;
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= static_cast<double>(n) / (m - 1);

  if (!(w > 0.0)) return out;
  const double var_plus = (n - 1.0) / n * w + b / n;
  out.rhat = std::sqrt(var_plus / w);
  out.defined = true;

  // bulk ESS via Geyer's initial monotone sequence on the combined
  // autocorrelations
  std::vector<double> rho(n, 0.0);
  std::vector<std::vector<double>> autocov(m, std::vector<double>(n, 0.0));
  for (int j = 0; j < m; ++j) {
    for (int t = 0; t < n - 1; ++t) {
      double c = 0.0;
      for (int i = 0; i + t < n; ++i)
        c += (seqs[j][i] - means[j]) * (seqs[j][i + t] - means[j]);
      autocov[j][t] = c / n;
    }
  }
  for (int t = 0; t < n - 1; ++t) {
    double mean_cov = 0.0;
    for (int j = 0; j < m; ++j) mean_cov += autocov[j][t];
    mean_cov /= m;
    rho[t] = 1.0 - (w - mean_cov) / var_plus;
  }

  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (int k = 0; 2 * k + 1 < n; ++k) {
    double pair = rho[2 * k] + rho[2 * k + 1];
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1e-3);
  out.ess = std::min(static_cast<double>(m) * n / tau,
                     static_cast<double>(m) * n);
  return out;
}

}  // namespace

DiagnosticsReport diagnostics(const PosteriorDraws& draws) {
  DiagnosticsReport report;
  if (draws.chains.empty()) throw MissingDraws("no chains to diagnose");

  const int n_params = draws.layout.n_params();
  const int retained = static_cast<int>(draws.chains[0].draws.rows());
  const int half = retained / 2;

  for (int j = 0; j < n_params; ++j) {
    DiagnosticRow row;
    row.param = draws.layout.names[j];

    // split every chain in half
    std::vector<std::vector<double>> seqs;
    bool constant = true;
    double first = draws.chains[0].draws(0, j);
    for (const ChainDraws& c : draws.chains) {
      std::vector<double> a(half), b(half);
      for (int i = 0; i < half; ++i) {
        a[i] = c.draws(i, j);
        b[i] = c.draws(half + i, j);
        if (a[i] != first || b[i] != first) constant = false;
      }
      seqs.push_back(std::move(a));
      seqs.push_back(std::move(b));
    }

    if (constant || half < 4) {
      row.defined = false;
      row.rhat = std::numeric_limits<double>::quiet_NaN();
      row.ess = std::numeric_limits<double>::quiet_NaN();
      report.rows.push_back(row);
      continue;
    }

    // rank-normalize across all sequences jointly
    std::vector<double> pooled;
    pooled.reserve(seqs.size() * half);
    for (const auto& s : seqs) pooled.insert(pooled.end(), s.begin(), s.end());
    const std::vector<double> z = rank_normalize(pooled);
    std::vector<std::vector<double>> zseqs(seqs.size(),
                                           std::vector<double>(half));
    for (std::size_t s = 0; s < seqs.size(); ++s)
      for (int i = 0; i < half; ++i) zseqs[s][i] = z[s * half + i];

    const SplitStats st = split_stats(zseqs);
    row.defined = st.defined;
    row.rhat = st.defined ? st.rhat : std::numeric_limits<double>::quiet_NaN();
    row.ess = st.defined ? st.ess : std::numeric_limits<double>::quiet_NaN();
    row.flagged = st.defined && st.rhat > 1.01;
    if (st.defined) report.max_rhat = std::max(report.max_rhat, st.rhat);
    if (row.flagged) ++report.n_flagged;
    report.rows.push_back(row);
  }

  // pool acceptance statistics over chains
  for (const ChainDraws& c : draws.chains) {
    for (const BlockStat& b : c.blocks) {
      auto it = std::find_if(
          report.acceptance.begin(), report.acceptance.end(),
          [&](const BlockStat& s) { return s.name == b.name; });
      if (it == report.acceptance.end()) {
        report.acceptance.push_back(b);
      } else {
        it->proposals += b.proposals;
        it->accepted += b.accepted;
        it->proposals_post += b.proposals_post;
        it->accepted_post += b.accepted_post;
        it->scale = b.scale;  // last chain's scale, indicative only
      }
    }
  }
  return report;
}

}  // namespace scoremix
