#include "edmeta/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "edmeta/error.hpp"
#include "edmeta/rlmc.hpp"
#include "edmeta/rng.hpp"
#include "edmeta/special.hpp"

namespace edmeta::oracle {
namespace {

void check_weight(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("weight must be positive");
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

double normal_pdf(double x, double m, double s) {
  double z = (x - m) / s;
  return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x, double m, double s) { return 0.5 * std::erfc(-(x - m) / (s * std::numbers::sqrt2)); }

}  // namespace

ConjugateResult normal_mean_posterior(std::span<const double> data, double sigma0, double m0,
                                      double v0, double w) {
  if (data.empty()) throw DataError("normal_mean_posterior: no data");
  if (!(sigma0 > 0.0) || !(v0 > 0.0)) throw ParameterError("normal_mean_posterior: sigma0 and v0 must be positive");
  check_weight(w);
  double n = static_cast<double>(data.size()), sum = 0.0;
  for (double x : data) sum += x;
  double ybar = sum / n;
  double prec = 1.0 / v0 + w * n / (sigma0 * sigma0);
  ConjugateResult r;
  r.w = w;
  r.mean = (m0 / v0 + w * n * ybar / (sigma0 * sigma0)) / prec;
  r.sd = 1.0 / std::sqrt(prec);
  r.family = "normal-mean";
  return r;
}

ConjugateResult normal_precision_posterior(std::span<const double> data, double known_mean,
                                           double a, double b, double w) {
  if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("normal_precision_posterior: a and b must be positive");
  check_weight(w);
  double ss = 0.0;
  for (double x : data) ss += (x - known_mean) * (x - known_mean);
  ConjugateResult r;
  r.w = w;
  r.shape = a + w * static_cast<double>(data.size()) / 2.0;
  r.rate = b + w * ss / 2.0;
  r.mean = digamma(r.shape) - std::log(r.rate);
  r.sd = std::sqrt(trigamma(r.shape));
  r.family = "log-precision";
  return r;
}

ParamDeterminacy path_determinacy(const std::string& name, const MomentPath& path, double delta) {
  return determinacy_from_summaries(name, path(1.0), path(1.0 - delta), path(1.0 + delta), delta);
}

ParamDeterminacy flat_normal_mean_determinacy(double delta) {
  std::vector<double> data{-1.0, 0.5, 2.0, 1.5};
  return path_determinacy(
      "mu",
      [&](double w) {
        auto r = normal_mean_posterior(data, 2.0, 0.0, 1e12, w);
        return NormalSummary{r.mean, r.sd};
      },
      delta);
}

double GriddedDensity::mass() const { return trapezoid(x, p); }

NormalSummary GriddedDensity::moments() const {
  double m0 = mass();
  std::vector<double> tmp(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] * p[i];
  double mean = trapezoid(x, tmp) / m0;
  for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = (x[i] - mean) * (x[i] - mean) * p[i];
  return {mean, std::sqrt(trapezoid(x, tmp) / m0)};
}

GriddedDensity tabulate(const std::function<double(double)>& pdf, double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 3) throw ParameterError("tabulate: need hi > lo and at least 3 points");
  GriddedDensity g;
  g.x.resize(n);
  g.p.resize(n);
  double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    g.x[i] = lo + h * static_cast<double>(i);
    g.p[i] = pdf(g.x[i]);
    if (!(g.p[i] >= 0.0) || !std::isfinite(g.p[i])) throw DataError("tabulate: density must be finite and non-negative");
  }
  double m = g.mass();
  if (!(m > 0.0)) throw DataError("tabulate: density has no mass on the grid");
  for (double& v : g.p) v /= m;
  return g;
}

GriddedDensity log_transform(const std::function<double(double)>& pdf, double lo, double hi,
                             std::size_t n) {
  return tabulate([&](double u) { return pdf(std::exp(u)) * std::exp(u); }, lo, hi, n);
}

double quadrature_bc(const GriddedDensity& f, const GriddedDensity& g) {
  if (f.x != g.x || f.p.size() != f.x.size() || g.p.size() != g.x.size())
    throw DataError("quadrature_bc: densities are not on a common grid");
  if (std::abs(f.mass() - 1.0) > 1e-6 || std::abs(g.mass() - 1.0) > 1e-6)
    throw DataError("quadrature_bc: densities must be normalised on the grid");
  std::vector<double> r(f.x.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::sqrt(f.p[i] * g.p[i]);
  return trapezoid(f.x, r);
}

double normal_approx_error(const GriddedDensity& f, const NormalSummary& s) {
  GriddedDensity n;
  n.x = f.x;
  n.p.resize(f.x.size());
  for (std::size_t i = 0; i < n.x.size(); ++i) n.p[i] = normal_pdf(n.x[i], s.mean, s.sd);
  double m = n.mass();
  for (double& v : n.p) v /= m;
  return std::abs(quadrature_bc(f, n) - bc_normal(s, s));
}

NnhmExact nnhm_exact(const MetaDataset& d, const ModelSpec& m, double w) {
  if (m.family != ModelFamily::NNHMCentered && m.family != ModelFamily::NNHMNonCentered &&
      m.family != ModelFamily::SimB)
    throw ModelError("nnhm_exact: only normal-normal hierarchical models are supported");
  validate(m);
  validate(d);
  check_weight(w);
  const DistSpec mu_prior = m.prior(Role::Mu);
  const DistSpec tau_prior = m.prior(Role::Tau);
  const double m0 = mu_prior.p1, v0 = mu_prior.p2;
  const std::size_t k = d.k();

  std::vector<double> s2(k);
  double smin = INFINITY, smax = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    s2[j] = d.sigma[j] * d.sigma[j] / w;  // N(y|theta,s^2)^w is N(y|theta,s^2/w) up to a constant
    smin = std::min(smin, d.sigma[j]);
    smax = std::max(smax, d.sigma[j]);
  }

  // Grid on u = log(tau).
  const std::size_t n = 40001;
  const double lo = std::log(smin * 1e-7), hi = std::log(smax * 1e5);
  std::vector<double> u(n), lp(n), cm(n), cv(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    double tau = std::exp(u[i]), t2 = tau * tau;
    double prec = 1.0 / v0, lin = m0 / v0, quad = m0 * m0 / v0, logdet = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double v = t2 + s2[j];
      prec += 1.0 / v;
      lin += d.y[j] / v;
      quad += d.y[j] * d.y[j] / v;
      logdet += std::log(v);
    }
    double V = 1.0 / prec, mean = V * lin;
    cm[i] = mean;
    cv[i] = V;
    // log p(y | tau) up to a constant, then the prior on log(tau)
    lp[i] = -0.5 * logdet + 0.5 * std::log(V) - 0.5 * (quad - mean * mean / V) + log_pdf(tau_prior, tau) + u[i];
    if (std::isnan(lp[i])) lp[i] = -INFINITY;
  }
  double top = *std::max_element(lp.begin(), lp.end());
  if (!std::isfinite(top)) throw NumericError("nnhm_exact: posterior vanishes on the grid");
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::exp(lp[i] - top);
  double z = trapezoid(u, p);
  for (double& v : p) v /= z;

  auto expect = [&](auto f) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = f(i) * p[i];
    return trapezoid(u, t);
  };
  NnhmExact r;
  double e_mu = expect([&](std::size_t i) { return cm[i]; });
  double e_mu2 = expect([&](std::size_t i) { return cv[i] + cm[i] * cm[i]; });
  r.mu = {e_mu, std::sqrt(e_mu2 - e_mu * e_mu)};
  double e_l = expect([&](std::size_t i) { return -2.0 * u[i]; });
  double e_l2 = expect([&](std::size_t i) { return 4.0 * u[i] * u[i]; });
  r.log_prec = {e_l, std::sqrt(e_l2 - e_l * e_l)};

  // Quantiles of the normal mixture over the support that matters.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (p[i] > 1e-14) keep.push_back(i);
  double wsum = 0.0;
  std::vector<double> wt(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    std::size_t i = keep[j];
    double h = (i > 0 ? u[i] - u[i - 1] : 0.0) + (i + 1 < n ? u[i + 1] - u[i] : 0.0);
    wt[j] = 0.5 * h * p[i];
    wsum += wt[j];
  }
  auto mix_cdf = [&](double x) {
    double acc = 0.0;
    for (std::size_t j = 0; j < keep.size(); ++j) acc += wt[j] * normal_cdf(x, cm[keep[j]], std::sqrt(cv[keep[j]]));
    return acc / wsum;
  };
  auto q = [&](double prob) {
    std::uintmax_t it = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-10; };
    auto [a, b] = boost::math::tools::toms748_solve([&](double x) { return mix_cdf(x) - prob; },
                                                    r.mu.mean - 40 * r.mu.sd, r.mu.mean + 40 * r.mu.sd, tol, it);
    return 0.5 * (a + b);
  };
  r.mu_q025 = q(0.025);
  r.mu_q50 = q(0.5);
  r.mu_q975 = q(0.975);
  return r;
}

std::vector<ParamDeterminacy> nnhm_exact_determinacy(const MetaDataset& d, const ModelSpec& m,
                                                     double delta) {
  auto base = nnhm_exact(d, m, 1.0);
  auto lo = nnhm_exact(d, m, 1.0 - delta);
  auto hi = nnhm_exact(d, m, 1.0 + delta);
  std::vector<ParamDeterminacy> out;
  out.push_back(determinacy_from_summaries("mu", base.mu, lo.mu, hi.mu, delta));
  out.back().q025 = base.mu_q025;
  out.back().q50 = base.mu_q50;
  out.back().q975 = base.mu_q975;
  out.push_back(determinacy_from_summaries("log(tau^-2)", base.log_prec, lo.log_prec, hi.log_prec, delta));
  return out;
}

std::vector<CheckResult> run_checks(std::ostream& out, const BcFunction& bc) {
  std::vector<CheckResult> results;
  auto record = [&](std::string name, bool ok, std::string detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    results.push_back({std::move(name), ok, std::move(detail)});
  };
  const double delta = 0.01;

  // Analytic TED. The spread factor is the whole BC when the mean is fixed.
  {
    auto path = [](double w) { return NormalSummary{0.7, 1.3 / std::sqrt(w)}; };
    double total = second_diff(bc(path(1.0), path(1.0 - delta)), bc(path(1.0), path(1.0 + delta)), delta);
    auto det = flat_normal_mean_determinacy(delta);
    double pedl = det.pedl.value_or(NAN), peds = det.peds.value_or(NAN);
    bool ok = std::abs(total - 0.125) < 1e-4 && std::abs(det.ted - 0.125) < 1e-4 && std::abs(pedl) < 1e-6 &&
              std::abs(peds - 1.0) < 1e-6;
    record("analytic-ted", ok, fmt::format("TED={:.3f} pEDL={:.3f} pEDS={:.3f} (bc path TED={:.6f})", det.ted, pedl, peds, total));
  }

  // BC closed form against quadrature on random pairs.
  {
    RngStream rng(20211014);
    double worst = 0.0, worst_split = 0.0;
    bool in_range = true;
    for (int i = 0; i < 100; ++i) {
      NormalSummary a{4.0 * rng.normal(), std::exp(rng.normal())};
      NormalSummary b{a.mean + 2.0 * rng.normal(), a.sd * std::exp(0.5 * rng.normal())};
      double lo_x = std::min(a.mean - 10 * a.sd, b.mean - 10 * b.sd);
      double hi_x = std::max(a.mean + 10 * a.sd, b.mean + 10 * b.sd);
      auto fa = tabulate([&](double x) { return normal_pdf(x, a.mean, a.sd); }, lo_x, hi_x, 10000);
      auto fb = tabulate([&](double x) { return normal_pdf(x, b.mean, b.sd); }, lo_x, hi_x, 10000);
      double v = bc(a, b);
      worst = std::max(worst, std::abs(v - quadrature_bc(fa, fb)));
      auto f = bc_split(a, b);
      worst_split = std::max(worst_split, std::abs(f.location * f.spread - v));
      in_range = in_range && v > 0.0 && v <= 1.0;
    }
    record("bc-quadrature", worst < 1e-6, fmt::format("max |closed form - quadrature| = {:.3g}", worst));
    record("bc-factorisation", worst_split < 1e-14 && in_range,
           fmt::format("max |BC_L BC_S - BC| = {:.3g}, all values in (0, 1]: {}", worst_split, in_range));
  }

  // Conjugate normal mean.
  {
    std::vector<double> data{1.0, 2.0, 3.0, 6.0};
    auto r1 = normal_mean_posterior(data, 2.0, 0.0, 1e12, 1.0);
    auto r2 = normal_mean_posterior(data, 2.0, 0.0, 1e12, 2.0);
    bool ok = std::abs(r1.mean - 3.0) < 1e-9 && std::abs(r1.sd - 1.0) < 1e-9 &&
              std::abs(r2.sd - r1.sd / std::sqrt(2.0)) < 1e-12;
    record("normal-mean-conjugacy", ok, fmt::format("mean={:.6f} sd(w=1)={:.6f} sd(w=2)={:.6f}", r1.mean, r1.sd, r2.sd));
  }

  // Log-precision path: weighting acts mostly on the spread.
  {
    RngStream rng(7);
    std::vector<double> data(50);
    for (double& x : data) x = 1.5 * rng.normal();
    auto det = path_determinacy(
        "log(prec)",
        [&](double w) {
          auto r = normal_precision_posterior(data, 0.0, 0.001, 0.001, w);
          return NormalSummary{r.mean, r.sd};
        },
        delta);
    auto prior = normal_precision_posterior({}, 0.0, 0.001, 0.001, 1.0);
    double peds = det.peds.value_or(NAN);
    bool ok = peds >= 0.95 && prior.shape == 0.001 && prior.rate == 0.001;
    record("log-precision-path", ok, fmt::format("TED={:.4g} pEDS={:.4f}", det.ted, peds));
  }

  // Digamma / trigamma anchors.
  {
    constexpr double euler = 0.57721566490153286061;
    double e1 = std::abs(digamma(1.0) + euler);
    double e2 = std::abs(trigamma(1.0) - std::numbers::pi * std::numbers::pi / 6.0);
    double e3 = std::abs(digamma(0.5) + euler + 2.0 * std::numbers::ln2);
    record("polygamma", std::max({e1, e2, e3}) < 1e-12, fmt::format("max error {:.3g}", std::max({e1, e2, e3})));
  }

  // Quadrature BC edge cases.
  {
    auto f = tabulate([](double x) { return normal_pdf(x, 0.0, 1.0); }, -10, 10, 10000);
    auto left = tabulate([](double x) { return x < -1.0 ? 1.0 : 0.0; }, -10, 10, 10000);
    auto right = tabulate([](double x) { return x > 1.0 ? 1.0 : 0.0; }, -10, 10, 10000);
    double self = quadrature_bc(f, f), disjoint = quadrature_bc(left, right);
    record("quadrature-bc-edges", std::abs(self - 1.0) < 1e-6 && disjoint == 0.0,
           fmt::format("BC(f,f)={:.9f} BC(disjoint)={:.3g}", self, disjoint));
  }

  // Moment-matching error on skewed densities.
  {
    auto gamma_pdf = [](double shape) {
      return [shape](double x) {
        return x <= 0.0 ? 0.0 : std::exp((shape - 1.0) * std::log(x) - x - std::lgamma(shape));
      };
    };
    auto normal = tabulate([](double x) { return normal_pdf(x, 1.0, 2.0); }, -19, 21, 20001);
    double e_normal = normal_approx_error(normal, normal.moments());
    auto raw2 = tabulate(gamma_pdf(2.0), -10 * std::sqrt(2.0), 2 + 40 * std::sqrt(2.0), 40001);
    auto log2 = log_transform(gamma_pdf(2.0), -30.0, 5.0, 40001);
    auto log50 = log_transform(gamma_pdf(50.0), std::log(50.0) - 3.0, std::log(50.0) + 2.0, 40001);
    double e_raw2 = normal_approx_error(raw2, raw2.moments());
    double e_log2 = normal_approx_error(log2, log2.moments());
    double e_log50 = normal_approx_error(log50, log50.moments());
    record("normal-approximation", e_normal < 1e-6 && e_log2 < e_raw2 && e_log50 < 1e-3,
           fmt::format("normal {:.2g}; Gamma(2) raw {:.4f} log {:.4f}; log Gamma(50) {:.2g}", e_normal, e_raw2,
                       e_log2, e_log50));
  }

  // RLMC of the eight schools under the HN(5) median.
  {
    auto d = eight_schools();
    double v = rlmc(median(DistSpec::half_normal(5.0)), d.sigma);
    record("rlmc-eight-schools", std::abs(v - 0.08) <= 0.005, fmt::format("RLMC(median HN(5)) = {:.4f}", v));
  }
  return results;
}

}  // namespace edmeta::oracle
