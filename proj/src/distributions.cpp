#include "edmeta/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "edmeta/error.hpp"

namespace edmeta {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_log_pdf(double x, double mean, double variance) {
  double z = x - mean;
  return -kLogSqrt2Pi - 0.5 * std::log(variance) - 0.5 * z * z / variance;
}

double normal_cdf(double x, double mean, double variance) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

bool is_integer(double v) { return std::floor(v) == v; }

}  // namespace

void validate(const DistSpec& d) {
  auto fail = [&](const char* why) {
    throw ParameterError(to_string(d) + ": " + why);
  };
  if (!std::isfinite(d.p1) || !std::isfinite(d.p2)) fail("non-finite parameter");
  switch (d.family) {
    case Family::Normal:
    case Family::ExpNormal:
      if (d.p2 <= 0.0) fail("variance must be positive");
      break;
    case Family::HalfNormal:
    case Family::HalfCauchy:
      if (d.p1 <= 0.0) fail("scale must be positive");
      break;
    case Family::SqrtInvGamma:
      if (d.p1 <= 0.0 || d.p2 <= 0.0) fail("shape and scale must be positive");
      break;
    case Family::Binomial:
      if (d.p1 < 1.0 || !is_integer(d.p1)) fail("trials must be a positive integer");
      if (d.p2 < 0.0 || d.p2 > 1.0) fail("probability must lie in [0, 1]");
      break;
  }
}

bool positive_support(const DistSpec& d) {
  switch (d.family) {
    case Family::HalfNormal:
    case Family::HalfCauchy:
    case Family::SqrtInvGamma:
    case Family::ExpNormal:
      return true;
    default:
      return false;
  }
}

double log_pdf(const DistSpec& d, double x) {
  validate(d);
  switch (d.family) {
    case Family::Normal:
      return normal_log_pdf(x, d.p1, d.p2);
    case Family::HalfNormal:
      if (x < 0.0) return -kInf;
      return std::numbers::ln2 + normal_log_pdf(x, 0.0, d.p1 * d.p1);
    case Family::HalfCauchy: {
      if (x < 0.0) return -kInf;
      double z = x / d.p1;
      return std::log(2.0 / (std::numbers::pi * d.p1)) - std::log1p(z * z);
    }
    case Family::SqrtInvGamma: {
      if (x <= 0.0) return -kInf;
      // Inverse-gamma density of x^2 times the Jacobian 2x.
      double a = d.p1, b = d.p2, x2 = x * x;
      return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x2) - b / x2 +
             std::log(2.0 * x);
    }
    case Family::ExpNormal:
      if (x <= 0.0) return -kInf;
      return normal_log_pdf(std::log(x), d.p1, d.p2) - std::log(x);
    case Family::Binomial: {
      double n = d.p1, p = d.p2;
      if (x < 0.0 || x > n || !is_integer(x)) return -kInf;
      double log_choose = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0);
      double lp = x > 0.0 ? x * std::log(p) : 0.0;
      double lq = n - x > 0.0 ? (n - x) * std::log1p(-p) : 0.0;
      return log_choose + lp + lq;
    }
  }
  return -kInf;
}

double cdf(const DistSpec& d, double x) {
  validate(d);
  switch (d.family) {
    case Family::Normal:
      return normal_cdf(x, d.p1, d.p2);
    case Family::HalfNormal:
      return x <= 0.0 ? 0.0 : std::erf(x / (d.p1 * std::numbers::sqrt2));
    case Family::HalfCauchy:
      return x <= 0.0 ? 0.0 : 2.0 / std::numbers::pi * std::atan(x / d.p1);
    case Family::SqrtInvGamma:
      // P(X <= x) = P(1/X^2 >= 1/x^2) with 1/X^2 ~ Gamma(shape, rate = scale).
      return x <= 0.0 ? 0.0 : boost::math::gamma_q(d.p1, d.p2 / (x * x));
    case Family::ExpNormal:
      return x <= 0.0 ? 0.0 : normal_cdf(std::log(x), d.p1, d.p2);
    case Family::Binomial: {
      if (x < 0.0) return 0.0;
      if (x >= d.p1) return 1.0;
      double total = 0.0;
      for (double k = 0.0; k <= std::floor(x); k += 1.0) total += std::exp(log_pdf(d, k));
      return std::min(total, 1.0);
    }
  }
  return 0.0;
}

double sample(const DistSpec& d, RngStream& rng) {
  validate(d);
  switch (d.family) {
    case Family::Normal:
      return d.p1 + std::sqrt(d.p2) * rng.normal();
    case Family::HalfNormal:
      return std::abs(d.p1 * rng.normal());
    case Family::HalfCauchy:
      return std::abs(d.p1 * std::tan(std::numbers::pi * (rng.uniform() - 0.5)));
    case Family::SqrtInvGamma: {
      // 1/X^2 ~ Gamma(shape, rate = scale).
      double g = rng.gamma(d.p1) / d.p2;
      if (g <= 0.0) return kInf;
      return 1.0 / std::sqrt(g);
    }
    case Family::ExpNormal:
      return std::exp(d.p1 + std::sqrt(d.p2) * rng.normal());
    case Family::Binomial:
      return static_cast<double>(rng.binomial(static_cast<long>(d.p1), d.p2));
  }
  return 0.0;
}

double median(const DistSpec& d) {
  validate(d);
  switch (d.family) {
    case Family::Normal:
      return d.p1;
    case Family::HalfNormal:
      return d.p1 * std::numbers::sqrt2 * boost::math::erf_inv(0.5);
    case Family::HalfCauchy:
      return d.p1;  // c * tan(pi / 4)
    case Family::ExpNormal:
      return std::exp(d.p1);
    case Family::SqrtInvGamma: {
      // Inverse CDF: gamma_q(shape, scale / x^2) = 1/2.
      double g = boost::math::gamma_q_inv(d.p1, 0.5);
      if (!(g > 0.0)) throw NumericError(to_string(d) + ": median underflows");
      return std::sqrt(d.p2 / g);
    }
    case Family::Binomial:
      throw ParameterError("median: Binomial is not a continuous family");
  }
  return 0.0;
}

DistSpec parse_dist(std::string_view text) {
  auto bad = [&](const std::string& why) {
    return ParameterError("cannot parse distribution '" + std::string(text) + "': " + why);
  };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
  auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') throw bad("expected family(args)");
  std::string name = s.substr(0, open);
  std::string inner = s.substr(open + 1, s.size() - open - 2);

  std::vector<double> args;
  std::size_t pos = 0;
  while (pos <= inner.size() && !inner.empty()) {
    auto comma = inner.find(',', pos);
    std::string tok = inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
      throw bad("invalid number '" + tok + "'");
    args.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  auto want = [&](std::size_t n) {
    if (args.size() != n) throw bad("expected " + std::to_string(n) + " argument(s)");
  };
  DistSpec d;
  if (name == "n" || name == "normal") {
    want(2);
    d = DistSpec::normal(args[0], args[1]);
  } else if (name == "hn" || name == "halfnormal") {
    want(1);
    d = DistSpec::half_normal(args[0]);
  } else if (name == "hc" || name == "halfcauchy") {
    want(1);
    d = DistSpec::half_cauchy(args[0]);
  } else if (name == "sqrtig" || name == "sqrtinvgamma") {
    want(2);
    d = DistSpec::sqrt_inv_gamma(args[0], args[1]);
  } else if (name == "expn" || name == "expnormal") {
    want(2);
    d = DistSpec::exp_normal(args[0], args[1]);
  } else if (name == "bin" || name == "binomial") {
    want(2);
    d = DistSpec::binomial(args[0], args[1]);
  } else {
    throw bad("unknown family '" + name + "'");
  }
  validate(d);
  return d;
}

std::string to_string(const DistSpec& d) {
  std::ostringstream os;
  os.precision(12);
  switch (d.family) {
    case Family::Normal: os << "N(" << d.p1 << "," << d.p2 << ")"; break;
    case Family::HalfNormal: os << "HN(" << d.p1 << ")"; break;
    case Family::HalfCauchy: os << "HC(" << d.p1 << ")"; break;
    case Family::SqrtInvGamma: os << "SqrtIG(" << d.p1 << "," << d.p2 << ")"; break;
    case Family::ExpNormal: os << "expN(" << d.p1 << "," << d.p2 << ")"; break;
    case Family::Binomial: os << "Bin(" << d.p1 << "," << d.p2 << ")"; break;
  }
  return os.str();
}

}  // namespace edmeta
