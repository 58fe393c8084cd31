#include <cstdio>
#include <fstream>
#include <sstream>

#include "scoremix/mcmc.hpp"

namespace scoremix {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> tab_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != '\n') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void save_draws(const std::string& path, const PosteriorDraws& draws) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  const SamplerConfig& c = draws.config;
  out << "scoremix-draws\t1\n";
  out << "chains\t" << c.n_chains << "\n";
  out << "iterations\t" << c.n_iterations << "\n";
  out << "burnin\t" << c.n_burnin << "\n";
  out << "seed\t" << c.seed << "\n";
  out << "adaptation_window\t" << c.adaptation_window << "\n";
  out << "target_acceptance\t" << fmt(c.target_acceptance) << "\n";
  out << "teams\t" << draws.layout.n_teams << "\n";
  out << "seasons\t" << draws.layout.n_seasons << "\n";
  out << "away_intercept\t" << (draws.layout.away_intercept ? 1 : 0) << "\n";
  out << "matches";
  for (int id : draws.layout.match_ids) out << "\t" << id;
  out << "\n";
  out << "params";
  for (const std::string& n : draws.layout.names) out << "\t" << n;
  out << "\n";
  for (int ci = 0; ci < static_cast<int>(draws.chains.size()); ++ci) {
    const ChainDraws& chain = draws.chains[ci];
    for (int r = 0; r < chain.draws.rows(); ++r) {
      out << "draw\t" << ci;
      for (int j = 0; j < chain.draws.cols(); ++j)
        out << "\t" << fmt(chain.draws(r, j));
      out << "\n";
    }
    for (const BlockStat& b : chain.blocks)
      out << "block\t" << ci << "\t" << b.name << "\t" << b.proposals << "\t"
          << b.accepted << "\t" << b.proposals_post << "\t"
          << b.accepted_post << "\t" << fmt(b.scale) << "\n";
  }
  out << "end\n";
}

PosteriorDraws load_draws(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingDraws("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw MissingDraws(path + ": empty draws file");
  std::vector<std::string> f = tab_fields(line);
  if (f.size() != 2 || f[0] != "scoremix-draws" || f[1] != "1")
    throw MissingDraws(path + ": not a scoremix draws file (v1)");

  PosteriorDraws draws;
  std::vector<std::vector<Eigen::VectorXd>> rows_by_chain;
  bool saw_end = false;
  while (std::getline(in, line)) {
    f = tab_fields(line);
    if (f.empty() || f[0].empty()) continue;
    const std::string& tag = f[0];
    if (tag == "chains") {
      draws.config.n_chains = std::stoi(f.at(1));
      draws.chains.resize(draws.config.n_chains);
      rows_by_chain.resize(draws.config.n_chains);
    } else if (tag == "iterations") {
      draws.config.n_iterations = std::stoi(f.at(1));
    } else if (tag == "burnin") {
      draws.config.n_burnin = std::stoi(f.at(1));
    } else if (tag == "seed") {
      draws.config.seed = std::stoull(f.at(1));
    } else if (tag == "adaptation_window") {
      draws.config.adaptation_window = std::stoi(f.at(1));
    } else if (tag == "target_acceptance") {
      draws.config.target_acceptance = std::stod(f.at(1));
    } else if (tag == "teams") {
      draws.layout.n_teams = std::stoi(f.at(1));
    } else if (tag == "seasons") {
      draws.layout.n_seasons = std::stoi(f.at(1));
    } else if (tag == "away_intercept") {
      draws.layout.away_intercept = f.at(1) == "1";
    } else if (tag == "matches") {
      for (std::size_t i = 1; i < f.size(); ++i)
        if (!f[i].empty()) draws.layout.match_ids.push_back(std::stoi(f[i]));
    } else if (tag == "params") {
      draws.layout.names.assign(f.begin() + 1, f.end());
    } else if (tag == "draw") {
      const int ci = std::stoi(f.at(1));
      Eigen::VectorXd v(static_cast<int>(f.size()) - 2);
      for (std::size_t i = 2; i < f.size(); ++i)
        v[static_cast<int>(i) - 2] = std::stod(f[i]);
      rows_by_chain.at(ci).push_back(std::move(v));
    } else if (tag == "block") {
      BlockStat b;
      b.name = f.at(2);
      b.proposals = std::stol(f.at(3));
      b.accepted = std::stol(f.at(4));
      b.proposals_post = std::stol(f.at(5));
      b.accepted_post = std::stol(f.at(6));
      b.scale = std::stod(f.at(7));
      draws.chains.at(std::stoi(f.at(1))).blocks.push_back(b);
    } else if (tag == "end") {
      saw_end = true;
      break;
    } else {
      throw MissingDraws(path + ": unknown tag '" + tag + "'");
    }
  }
  if (!saw_end) throw MissingDraws(path + ": truncated draws file");

  const int P = draws.layout.n_params();
  for (int ci = 0; ci < draws.config.n_chains; ++ci) {
    const auto& rows = rows_by_chain[ci];
    Eigen::MatrixXd m(static_cast<int>(rows.size()), P);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (rows[r].size() != P)
        throw MissingDraws(path + ": draw width mismatch");
      m.row(r) = rows[r];
    }
    draws.chains[ci].draws = std::move(m);
  }
  return draws;
}

void save_diagnostics(const std::string& path,
                      const DiagnosticsReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "# scoremix diagnostics\n";
  out << "# max_rhat\t" << fmt(report.max_rhat) << "\n";
  out << "# flagged\t" << report.n_flagged << "\n";
  for (const BlockStat& b : report.acceptance) {
    char rate[48];
    std::snprintf(rate, sizeof(rate), "%.4f\t%.4f", b.rate(), b.rate_post());
    out << "accept\t" << b.name << "\t" << b.proposals << "\t" << b.accepted
        << "\t" << rate << "\n";
  }
  out << "param\trhat\tess\tflag\n";
  for (const DiagnosticRow& r : report.rows) {
    out << r.param << "\t";
    if (r.defined) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.5f\t%.1f", r.rhat, r.ess);
      out << buf;
    } else {
      out << "undefined\tundefined";
    }
    out << "\t" << (r.flagged ? "FLAG" : "ok") << "\n";
  }
}

}  // namespace scoremix
