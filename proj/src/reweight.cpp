#include "edmeta/reweight.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edmeta/error.hpp"

namespace edmeta {

std::vector<double> log_weights(std::span<const double> loglik, double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("weight must be positive");
  if (loglik.empty()) throw DataError("log_weights: no draws");
  std::vector<double> out(loglik.size());
  double top = -INFINITY;
  for (std::size_t i = 0; i < loglik.size(); ++i) {
    if (!std::isfinite(loglik[i])) throw DataError("log_weights: non-finite log-likelihood");
    out[i] = (w - 1.0) * loglik[i];
    top = std::max(top, out[i]);
  }
  for (double& v : out) v -= top;
  return out;
}

double kish_ess(std::span<const double> log_w) {
  double s = 0.0, s2 = 0.0;
  for (double lw : log_w) {
    double c = std::exp(lw);
    s += c;
    s2 += c * c;
  }
  return s * s / s2;
}

Moments weighted_moments(std::span<const double> values, std::span<const double> log_w) {
  if (values.size() != log_w.size() || values.empty())
    throw DimensionError("weighted_moments: values and weights must be non-empty and aligned");
  double total = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double c = std::exp(log_w[i]);
    total += c;
    acc += c * values[i];
  }
  double mean = acc / total;
  double ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double dv = values[i] - mean;
    ss += std::exp(log_w[i]) * dv * dv;
  }
  return {mean, std::sqrt(ss / total)};
}

std::vector<double> analysis_draws(const DrawMatrix& draws, std::size_t param) {
  std::vector<double> v = draws.pooled(param);
  if (draws.layout.scale_tags[param] == ScaleTag::LogPrecision)
    for (double& x : v) x = -2.0 * std::log(x);
  return v;
}

WeightedMoments weighted_moments(const DrawMatrix& draws, double w) {
  if (draws.total() == 0) throw DataError("weighted_moments: no draws");
  std::vector<double> lw = log_weights(draws.pooled_loglik(), w);

  WeightedMoments out;
  out.w = w;
  out.draws = static_cast<double>(lw.size());
  out.kish_ess = kish_ess(lw);
  if (out.kish_ess < kKishFailFraction * out.draws) {
    std::ostringstream os;
    os << "importance weights at w = " << w << " are degenerate (Kish ESS " << out.kish_ess
       << " of " << out.draws << " draws); refit the model at this weight instead";
    throw DegenerateWeightsError(os.str(), out.kish_ess, out.draws);
  }
  out.degeneracy_warning = out.kish_ess < kKishWarnFraction * out.draws;
  for (std::size_t p = 0; p < draws.layout.size(); ++p) {
    out.names.push_back(draws.layout.analysis_name(p));
    out.params.push_back(weighted_moments(analysis_draws(draws, p), lw));
  }
  return out;
}

std::pair<WeightedMoments, WeightedMoments> moments_pair(const DrawMatrix& draws, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  return {weighted_moments(draws, 1.0 - delta), weighted_moments(draws, 1.0 + delta)};
}

}  // namespace edmeta
