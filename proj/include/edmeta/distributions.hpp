#pragma once

#include <string>
#include <string_view>

#include "edmeta/rng.hpp"

namespace edmeta {

enum class Family { Normal, HalfNormal, HalfCauchy, SqrtInvGamma, ExpNormal, Binomial };

// A parameterised distribution. Parameter meaning by family:
//   Normal(mean, variance)       -- second parameter is a VARIANCE
//   HalfNormal(scale)            -- |X|, X ~ Normal(0, scale^2)
//   HalfCauchy(scale)            -- |X|, X ~ Cauchy(0, scale)
//   SqrtInvGamma(shape, scale)   -- X^2 ~ InverseGamma(shape, scale)
//   ExpNormal(mean, variance)    -- exp(Z), Z ~ Normal(mean, variance)
//   Binomial(trials, prob)
struct DistSpec {
  Family family = Family::Normal;
  double p1 = 0.0;
  double p2 = 1.0;

  static DistSpec normal(double mean, double variance) { return {Family::Normal, mean, variance}; }
  static DistSpec half_normal(double scale) { return {Family::HalfNormal, scale, 0.0}; }
  static DistSpec half_cauchy(double scale) { return {Family::HalfCauchy, scale, 0.0}; }
  static DistSpec sqrt_inv_gamma(double shape, double scale) {
    return {Family::SqrtInvGamma, shape, scale};
  }
  static DistSpec exp_normal(double mean, double variance) {
    return {Family::ExpNormal, mean, variance};
  }
  static DistSpec binomial(double trials, double prob) { return {Family::Binomial, trials, prob}; }

  bool operator==(const DistSpec&) const = default;
};

// Throws ParameterError when the parameters are outside the family's domain.
void validate(const DistSpec& d);

// True when the support is contained in (0, inf) up to a null set; these
// families are admissible as priors for standard deviations.
bool positive_support(const DistSpec& d);

double log_pdf(const DistSpec& d, double x);
double cdf(const DistSpec& d, double x);
double sample(const DistSpec& d, RngStream& rng);

// Exact median for families with a closed form, the inverse CDF otherwise.
double median(const DistSpec& d);

// Parses `HN(5)`, `HC(1)`, `N(0,16)`, `SqrtIG(4,1)`, `expN(0,1000)`,
// `Bin(10,0.3)`; case-insensitive, whitespace tolerant.
DistSpec parse_dist(std::string_view text);
std::string to_string(const DistSpec& d);

}  // namespace edmeta
