#include "edmeta/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "edmeta/error.hpp"

namespace edmeta {
namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

void check(const Chains& chains) {
  if (chains.empty()) throw DiagnosticError("no chains");
  std::size_t n = chains[0].size();
  if (n < 100) throw DiagnosticError("need at least 100 draws per chain, got " + std::to_string(n));
  for (const auto& c : chains) {
    if (c.size() != n) throw DiagnosticError("chains have different lengths");
    for (double x : c)
      if (!std::isfinite(x)) throw DiagnosticError("non-finite draw");
    auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    if (*lo == *hi) throw DiagnosticError("degenerate chain: zero variance");
  }
}

Chains split(const Chains& chains) {
  Chains out;
  for (const auto& c : chains) {
    std::size_t half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + half);
    out.emplace_back(c.end() - half, c.end());
  }
  return out;
}

// Autocovariance at `lag` with divisor n (biased estimator, as in Geyer).
double autocov(const std::vector<double>& c, double m, std::size_t lag) {
  double s = 0.0;
  for (std::size_t i = 0; i + lag < c.size(); ++i) s += (c[i] - m) * (c[i + lag] - m);
  return s / static_cast<double>(c.size());
}

}  // namespace

double ess(const Chains& chains) {
  check(chains);
  const std::size_t m = chains.size(), n = chains[0].size();
  std::vector<double> means(m), var(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = mean(chains[c]);
    var[c] = variance(chains[c]);
  }
  double w = mean(var);
  double var_plus = w * (n - 1.0) / n;
  if (m > 1) var_plus += variance(means);

  auto rho = [&](std::size_t lag) {
    double acov = 0.0;
    for (std::size_t c = 0; c < m; ++c) acov += autocov(chains[c], means[c], lag);
    acov /= static_cast<double>(m);
    return 1.0 - (w - acov) / var_plus;
  };

  // Geyer: sum consecutive pairs while positive, forcing them monotone.
  double tau = -1.0;  // -rho_0 + 2 * sum of pairs, with rho_0 = 1 in the first pair
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t + 1 < n; t += 2) {
    double pair = (t == 0 ? 1.0 : rho(t)) + rho(t + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  double total = static_cast<double>(m * n);
  if (!(tau > 0.0)) return total;
  return std::min(total / tau, total);
}

double split_rhat(const Chains& chains) {
  check(chains);
  Chains halves = split(chains);
  const std::size_t n = halves[0].size();
  std::vector<double> means, vars;
  for (const auto& h : halves) {
    means.push_back(mean(h));
    vars.push_back(variance(h));
  }
  double w = mean(vars);
  double b_over_n = variance(means);
  double var_plus = w * (n - 1.0) / n + b_over_n;
  return std::sqrt(var_plus / w);
}

RankHistogram rank_histogram(const Chains& chains) {
  check(chains);
  const std::size_t m = chains.size(), n = chains[0].size(), total = m * n;
  struct Item {
    double v;
    std::size_t chain;
  };
  std::vector<Item> all;
  all.reserve(total);
  for (std::size_t c = 0; c < m; ++c)
    for (double v : chains[c]) all.push_back({v, c});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.v < b.v; });

  RankHistogram out;
  out.counts.assign(m, std::vector<std::size_t>(RankHistogram::kBins, 0));
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && all[j].v == all[i].v) ++j;
    double rank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    auto bin = static_cast<std::size_t>((rank - 0.5) * RankHistogram::kBins / total);
    bin = std::min(bin, RankHistogram::kBins - 1);
    for (std::size_t q = i; q < j; ++q) ++out.counts[all[q].chain][bin];
    i = j;
  }

  // Chi-square on the chain x bin table against uniform expectation.
  double expected = static_cast<double>(n) / RankHistogram::kBins;
  for (const auto& row : out.counts)
    for (std::size_t c : row) out.chi_square += (c - expected) * (c - expected) / expected;
  out.dof = static_cast<double>(RankHistogram::kBins - 1) * static_cast<double>(m > 1 ? m - 1 : 1);
  out.p_value = boost::math::gamma_q(0.5 * out.dof, 0.5 * out.chi_square);
  return out;
}

double mcse_mean(const Chains& chains) {
  std::vector<double> pooled;
  for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());
  return std::sqrt(variance(pooled) / ess(chains));
}

double mcse_sd(const Chains& chains) {
  // Delta method on the variance: se(s) = se(s^2) / (2 s).
  std::vector<double> pooled;
  for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());
  double m = mean(pooled);
  Chains sq = chains;
  for (auto& c : sq)
    for (double& x : c) x = (x - m) * (x - m);
  std::vector<double> sq_pooled;
  for (const auto& c : sq) sq_pooled.insert(sq_pooled.end(), c.begin(), c.end());
  double s2 = mean(sq_pooled);
  double se_s2 = std::sqrt(variance(sq_pooled) / ess(sq));
  return se_s2 / (2.0 * std::sqrt(s2));
}

Chains analysis_chains(const DrawMatrix& draws, std::size_t param) {
  Chains out = draws.per_chain(param);
  if (draws.layout.scale_tags[param] == ScaleTag::LogPrecision)
    for (auto& c : out)
      for (double& x : c) x = -2.0 * std::log(x);
  return out;
}

const ParamDiagnostics& ChainDiagnostics::operator[](const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return p;
  throw DimensionError("no diagnostics for '" + name + "'");
}

double ChainDiagnostics::max_rhat() const {
  double r = 0.0;
  for (const auto& p : params) r = std::max(r, p.error.empty() ? p.split_rhat : INFINITY);
  return r;
}

double ChainDiagnostics::min_ess() const {
  double e = INFINITY;
  for (const auto& p : params) e = std::min(e, p.error.empty() ? p.ess : 0.0);
  return e;
}

double ChainDiagnostics::min_rank_p() const {
  double e = 1.0;
  for (const auto& p : params) e = std::min(e, p.error.empty() ? p.ranks.p_value : 0.0);
  return e;
}

ChainDiagnostics diagnose(const DrawMatrix& draws) {
  ChainDiagnostics out;
  for (std::size_t i = 0; i < draws.layout.size(); ++i) {
    ParamDiagnostics p;
    p.name = draws.layout.analysis_name(i);
    try {
      Chains c = analysis_chains(draws, i);
      p.ess = ess(c);
      p.split_rhat = split_rhat(c);
      p.ranks = rank_histogram(c);
      p.mcse_mean = mcse_mean(c);
      p.mcse_sd = mcse_sd(c);
    } catch (const DiagnosticError& e) {
      p.error = e.what();
    }
    out.params.push_back(std::move(p));
  }
  if (!draws.chains.empty()) out.mh_names = draws.chains[0].mh_names;
  for (const auto& c : draws.chains) out.acceptance.push_back(c.acceptance);
  return out;
}

}  // namespace edmeta
