#include "edmeta/rlmc.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>

#include <boost/math/tools/roots.hpp>

#include "edmeta/csv.hpp"
#include "edmeta/error.hpp"

namespace edmeta {
namespace {

void check_sigmas(std::span<const double> sigmas) {
  if (sigmas.empty()) throw DataError("rlmc: no within-study standard deviations");
  for (double s : sigmas)
    if (!(s > 0.0) || !std::isfinite(s)) throw DataError("rlmc: sigmas must be positive");
}

double unit_median(Family family) {
  switch (family) {
    case Family::HalfNormal: return median(DistSpec::half_normal(1.0));
    case Family::HalfCauchy: return median(DistSpec::half_cauchy(1.0));
    default: throw ParameterError("RLMC scale solving supports HalfNormal and HalfCauchy priors only");
  }
}

}  // namespace

double rlmc(double tau, std::span<const double> sigmas) {
  check_sigmas(sigmas);
  if (!(tau >= 0.0)) throw ParameterError("rlmc: tau must be >= 0");
  double t2 = tau * tau, acc = 0.0;
  for (double s : sigmas) acc += t2 / (t2 + s * s);
  return acc / static_cast<double>(sigmas.size());
}

double rlmc_reference(double tau, std::span<const double> sigmas) {
  check_sigmas(sigmas);
  if (!(tau >= 0.0)) throw ParameterError("rlmc: tau must be >= 0");
  double log_sum = 0.0;
  for (double s : sigmas) log_sum += std::log(s);
  double ref = std::exp(log_sum / static_cast<double>(sigmas.size()));
  double t2 = tau * tau;
  return t2 / (t2 + ref * ref);
}

double rlmc_value(RlmcFunctional f, double tau, std::span<const double> sigmas) {
  return f == RlmcFunctional::StudyAverage ? rlmc(tau, sigmas) : rlmc_reference(tau, sigmas);
}

double rlmc_at_median(double scale, std::span<const double> sigmas, Family family,
                      RlmcFunctional f) {
  if (!(scale > 0.0)) throw ParameterError("prior scale must be positive");
  return rlmc_value(f, scale * unit_median(family), sigmas);
}

double solve_scale(double target, std::span<const double> sigmas, Family family,
                   RlmcFunctional f) {
  if (!(target > 0.0 && target < 1.0)) throw ParameterError("RLMC target must lie in (0, 1)");
  check_sigmas(sigmas);
  const double m1 = unit_median(family);

  // Solve for the median tau, which the functional maps monotonically to (0, 1).
  auto g = [&](double tau) { return rlmc_value(f, tau, sigmas) - target; };
  double lo = 0.0, hi = 1.0;
  for (double s : sigmas) hi = std::max(hi, s);
  int expansions = 0;
  while (g(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 200 || !std::isfinite(hi))
      throw NumericError("solve_scale: could not bracket the RLMC target");
  }
  std::uintmax_t max_iter = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(b)); };
  auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, max_iter);
  double tau = 0.5 * (a + b);
  if (std::abs(g(tau)) > 1e-8) throw NumericError("solve_scale: root finder did not converge");
  return tau / m1;
}

RlmcGrid solve_grid(const std::vector<double>& targets, std::span<const double> sigmas,
                    Family family, RlmcFunctional f) {
  RlmcGrid grid;
  grid.targets = targets;
  grid.prior_family = family;
  grid.functional = f;
  grid.sigmas.assign(sigmas.begin(), sigmas.end());
  for (double t : targets) grid.solved_scales.push_back(solve_scale(t, sigmas, family, f));
  return grid;
}

void write_grid_csv(std::ostream& out, const RlmcGrid& grid) {
  out << "target,scale\n";
  for (std::size_t i = 0; i < grid.targets.size(); ++i)
    out << csv::format(grid.targets[i]) << ',' << csv::format(grid.solved_scales[i]) << '\n';
}

}  // namespace edmeta
