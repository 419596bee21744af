#include "edmeta/determinacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "edmeta/error.hpp"

namespace edmeta {
namespace {

void check_sd(const NormalSummary& s) {
  if (!(s.sd > 0.0) || !std::isfinite(s.sd) || !std::isfinite(s.mean))
    throw ParameterError("normal summary needs a finite mean and a positive sd");
}

double clamp_bc(double v) {
  return std::clamp(v, std::numeric_limits<double>::min(), 1.0);
}

NormalSummary to_summary(const Moments& m) { return {m.mean, m.sd}; }

}  // namespace

double bc_normal(const NormalSummary& a, const NormalSummary& b) {
  check_sd(a);
  check_sd(b);
  double s2 = a.sd * a.sd + b.sd * b.sd;
  double d = b.mean - a.mean;
  return std::sqrt(2.0 * a.sd * b.sd / s2) * std::exp(-d * d / (4.0 * s2));
}

BcFactors bc_split(const NormalSummary& a, const NormalSummary& b) {
  check_sd(a);
  check_sd(b);
  double s2 = a.sd * a.sd + b.sd * b.sd;
  double d = b.mean - a.mean;
  return {std::exp(-d * d / (4.0 * s2)), std::sqrt(2.0 * a.sd * b.sd / s2)};
}

double second_diff(double bc_minus, double bc_plus, double delta) {
  return (2.0 - bc_plus - bc_minus) / (delta * delta);
}

std::string_view to_string(Method m) { return m == Method::Reweight ? "reweight" : "refit"; }

const ParamDeterminacy& DeterminacyReport::operator[](const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return p;
  throw DimensionError("no determinacy entry for '" + name + "'");
}

ParamDeterminacy determinacy_from_summaries(const std::string& name, const NormalSummary& base,
                                            const NormalSummary& minus, const NormalSummary& plus,
                                            double delta) {
  ParamDeterminacy out;
  out.name = name;
  out.base = base;
  out.minus = minus;
  out.plus = plus;
  BcFactors lo = bc_split(base, minus), hi = bc_split(base, plus);
  lo.location = clamp_bc(lo.location), lo.spread = clamp_bc(lo.spread);
  hi.location = clamp_bc(hi.location), hi.spread = clamp_bc(hi.spread);
  out.bc_minus = lo;
  out.bc_plus = hi;

  out.edl = second_diff(lo.location, hi.location, delta);
  out.eds = second_diff(lo.spread, hi.spread, delta);
  out.ted = out.edl + out.eds;
  if (out.ted > 0.0) {
    out.pedl = out.edl / out.ted;
    out.peds = out.eds / out.ted;
  }
  double full_minus = lo.location * lo.spread, full_plus = hi.location * hi.spread;
  out.ted_full_bc = second_diff(full_minus, full_plus, delta);
  double eps = std::numeric_limits<double>::epsilon();
  out.noise_flag = (2.0 - full_plus - full_minus) < 10.0 * eps / (delta * delta);
  return out;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw DataError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  double h = (static_cast<double>(values.size()) - 1.0) * prob;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

DeterminacyReport determinacy(const DrawMatrix& draws, double delta, Method method,
                              const RefitInputs* refit) {
  if (!(delta > 0.0 && delta <= 0.1)) throw ParameterError("delta must lie in (0, 0.1]");
  DeterminacyReport out;
  out.delta = delta;
  out.method = method;
  out.draws = static_cast<double>(draws.total());

  WeightedMoments base = weighted_moments(draws, 1.0);
  WeightedMoments minus, plus;
  if (method == Method::Reweight) {
    std::tie(minus, plus) = moments_pair(draws, delta);
    out.kish_ess_minus = minus.kish_ess;
    out.kish_ess_plus = plus.kish_ess;
    for (const auto* wm : {&minus, &plus})
      if (wm->degeneracy_warning)
        out.warnings.push_back("Kish ESS at w = " + std::to_string(wm->w) +
                               " is below half the draws");
  } else {
    if (!refit) throw ParameterError("refit determinacy needs the model, data and configuration");
    minus = weighted_moments(run(refit->model, refit->data, refit->config, 1.0 - delta), 1.0);
    plus = weighted_moments(run(refit->model, refit->data, refit->config, 1.0 + delta), 1.0);
    out.kish_ess_minus = minus.kish_ess;
    out.kish_ess_plus = plus.kish_ess;
  }

  for (std::size_t p = 0; p < draws.layout.size(); ++p) {
    ParamDeterminacy d = determinacy_from_summaries(
        base.names[p], to_summary(base.params[p]), to_summary(minus.params[p]),
        to_summary(plus.params[p]), delta);
    std::vector<double> v = analysis_draws(draws, p);
    d.q025 = quantile(v, 0.025);
    d.q50 = quantile(v, 0.5);
    d.q975 = quantile(v, 0.975);
    if (d.noise_flag) out.warnings.push_back(d.name + ": BC change at machine-precision level");
    out.params.push_back(std::move(d));
  }
  return out;
}

std::vector<DeltaSweepRow> delta_sweep(const DrawMatrix& draws, const std::vector<double>& deltas) {
  std::vector<DeltaSweepRow> rows;
  for (std::size_t p = 0; p < draws.layout.size(); ++p)
    rows.push_back({draws.layout.analysis_name(p), {}, std::nullopt});
  for (double delta : deltas) {
    DeterminacyReport r = determinacy(draws, delta);
    for (std::size_t p = 0; p < rows.size(); ++p) rows[p].ted.push_back(r.params[p].ted);
  }
  std::vector<std::size_t> order(deltas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] < deltas[b]; });
  if (order.size() >= 2 &&
      std::abs(deltas[order[1]] - 2.0 * deltas[order[0]]) < 1e-12 * deltas[order[1]]) {
    for (auto& row : rows) row.richardson = (4.0 * row.ted[order[0]] - row.ted[order[1]]) / 3.0;
  }
  return rows;
}

}  // namespace edmeta
