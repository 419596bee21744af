#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edmeta/sampler.hpp"

namespace edmeta {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

// Moments of the weighted posterior pi_w estimated from base draws, one
// entry per layout parameter on its analysis scale.
struct WeightedMoments {
  double w = 1.0;
  std::vector<std::string> names;  // analysis-scale names
  std::vector<Moments> params;
  double kish_ess = 0.0;
  double draws = 0.0;
  bool degeneracy_warning = false;  // kish_ess < 50% of draws
};

// Kish ESS below these fractions of the draw count warns, then fails.
inline constexpr double kKishWarnFraction = 0.5;
inline constexpr double kKishFailFraction = 0.05;

// (w - 1) * loglik shifted so the maximum is 0: c_m = pi(y | psi_m)^(w-1)
// up to a constant. Throws DataError on non-finite input.
std::vector<double> log_weights(std::span<const double> loglik, double w);

// Importance-weighted mean and population sd of `values`.
Moments weighted_moments(std::span<const double> values, std::span<const double> log_w);
double kish_ess(std::span<const double> log_w);

// LogPrecision parameters are transformed to log(x^-2) before weighting.
// Throws DegenerateWeightsError when kish_ess < 5% of the draws.
WeightedMoments weighted_moments(const DrawMatrix& draws, double w);

// Weighted moments at 1 - delta and 1 + delta from the same draws.
std::pair<WeightedMoments, WeightedMoments> moments_pair(const DrawMatrix& draws, double delta);

// Pooled draws of parameter `param` on its analysis scale.
std::vector<double> analysis_draws(const DrawMatrix& draws, std::size_t param);

}  // namespace edmeta
