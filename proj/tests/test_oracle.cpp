#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "edmeta/determinacy.hpp"
#include "edmeta/diagnostics.hpp"
#include "edmeta/distributions.hpp"
#include "edmeta/error.hpp"
#include "edmeta/oracle.hpp"
#include "edmeta/rng.hpp"
#include "edmeta/special.hpp"
#include "test_util.hpp"

using namespace edmeta;
namespace o = edmeta::oracle;

namespace {

std::vector<double> toy_data(std::size_t n, double mean, double sd, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = mean + sd * rng.normal();
  return x;
}

}  // namespace

TEST_CASE("polygamma reference values") {
  const double euler = 0.5772156649015329;
  CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-13));
  CHECK(digamma(0.5) == doctest::Approx(-euler - 2 * std::log(2.0)).epsilon(1e-13));
  CHECK(digamma(1e-3) == doctest::Approx(-1000.0 - euler + 1.6449340668 * 1e-3 - 1.2020569032 * 1e-6).epsilon(1e-9));
  CHECK(trigamma(1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-13));
  CHECK(trigamma(0.5) == doctest::Approx(std::numbers::pi * std::numbers::pi / 2).epsilon(1e-13));
  for (double x : {0.3, 2.5, 9.9, 10.1, 123.0}) {
    CHECK(digamma(x + 1) - digamma(x) == doctest::Approx(1 / x).epsilon(1e-12));
    CHECK(trigamma(x) - trigamma(x + 1) == doctest::Approx(1 / (x * x)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(digamma(0.0), ParameterError);
  CHECK_THROWS_AS(trigamma(-1.0), ParameterError);
}

TEST_CASE("normal mean conjugacy") {
  auto x = toy_data(40, 1.5, 2.0, 1);
  double ybar = 0;
  for (double v : x) ybar += v;
  ybar /= x.size();
  auto r = o::normal_mean_posterior(x, 2.0, 0.0, 1e12, 1.0);
  CHECK(r.mean == doctest::Approx(ybar).epsilon(1e-9));
  CHECK(r.sd == doctest::Approx(2.0 / std::sqrt(40.0)).epsilon(1e-9));
  auto r2 = o::normal_mean_posterior(x, 2.0, 0.0, 1e12, 2.0);
  CHECK(r2.sd == doctest::Approx(r.sd / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(r.family == "normal-mean");
  std::vector<double> empty;
  CHECK_THROWS_AS(o::normal_mean_posterior(empty, 1, 0, 1, 1), DataError);
  auto p = o::flat_normal_mean_determinacy(0.01);
  CHECK(std::abs(p.ted - 0.125) < 1e-4);
  CHECK(p.edl == 0.0);
  REQUIRE(p.peds);
  CHECK(*p.peds == 1.0);
}

TEST_CASE("normal precision conjugacy") {
  std::vector<double> none;
  auto prior = o::normal_precision_posterior(none, 0.0, 3.0, 2.0, 1.0);
  CHECK(prior.shape == 3.0);
  CHECK(prior.rate == 2.0);
  CHECK(prior.mean == doctest::Approx(digamma(3.0) - std::log(2.0)).epsilon(1e-14));
  CHECK(prior.sd == doctest::Approx(std::sqrt(trigamma(3.0))).epsilon(1e-14));
  auto x = toy_data(50, 0.0, 1.5, 2);
  double prev = INFINITY;
  for (double w : {0.5, 0.9, 1.0, 1.1, 2.0}) {
    auto r = o::normal_precision_posterior(x, 0.0, 0.001, 0.001, w);
    CHECK(r.sd < prev);
    prev = r.sd;
    CHECK(r.shape == doctest::Approx(0.001 + w * 25).epsilon(1e-14));
  }
  auto path = [&](double w) {
    auto r = o::normal_precision_posterior(x, 0.0, 0.001, 0.001, w);
    return NormalSummary{r.mean, r.sd};
  };
  auto d = o::path_determinacy("log-precision", path, 0.01);
  REQUIRE(d.peds);
  CHECK(*d.peds >= 0.95);
}

TEST_CASE("quadrature BC") {
  RngStream rng(3);
  for (int i = 0; i < 20; ++i) {
    NormalSummary a{rng.normal(), std::exp(0.5 * rng.normal())};
    NormalSummary b{a.mean + rng.normal(), std::exp(0.5 * rng.normal())};
    double lo = std::min(a.mean - 10 * a.sd, b.mean - 10 * b.sd);
    double hi = std::max(a.mean + 10 * a.sd, b.mean + 10 * b.sd);
    auto f = o::tabulate([&](double x) { return std::exp(log_pdf(DistSpec::normal(a.mean, a.sd * a.sd), x)); },
                         lo, hi, 10000);
    auto g = o::tabulate([&](double x) { return std::exp(log_pdf(DistSpec::normal(b.mean, b.sd * b.sd), x)); },
                         lo, hi, 10000);
    CHECK(std::abs(o::quadrature_bc(f, g) - bc_normal(a, b)) < 1e-6);
    CHECK(o::quadrature_bc(f, f) == doctest::Approx(1.0).epsilon(1e-6));
  }
  auto left = o::tabulate([](double x) { return x < 0 ? 1.0 : 0.0; }, -1, 1, 2001);
  auto right = o::tabulate([](double x) { return x > 0 ? 1.0 : 0.0; }, -1, 1, 2001);
  CHECK(o::quadrature_bc(left, right) == 0.0);
  auto other = o::tabulate([](double) { return 1.0; }, -1, 2, 2001);
  CHECK_THROWS_AS(o::quadrature_bc(left, other), DataError);
  auto unnormalised = left;
  for (auto& p : unnormalised.p) p *= 2;
  CHECK_THROWS_AS(o::quadrature_bc(unnormalised, right), DataError);
}

TEST_CASE("normal approximation error") {
  auto normal = o::tabulate([](double x) { return std::exp(-0.5 * x * x); }, -10, 10, 10000);
  CHECK(o::normal_approx_error(normal, normal.moments()) < 1e-6);
  auto gamma = [](double k) {
    return [k](double x) { return x <= 0 ? 0.0 : std::exp((k - 1) * std::log(x) - x - std::lgamma(k)); };
  };
  auto raw2 = o::tabulate(gamma(2), -10 * std::sqrt(2.0), 2 + 40 * std::sqrt(2.0), 40001);
  auto log2 = o::log_transform(gamma(2), -30, 5, 40001);
  CHECK(o::normal_approx_error(log2, log2.moments()) < o::normal_approx_error(raw2, raw2.moments()));
  auto log50 = o::log_transform(gamma(50), std::log(50.0) - 3, std::log(50.0) + 2, 40001);
  CHECK(o::normal_approx_error(log50, log50.moments()) < 1e-3);
}

TEST_CASE("exact NNHM posterior for the eight schools") {
  auto d = eight_schools();
  auto m = eight_schools_model(ModelFamily::NNHMCentered);
  auto e = o::nnhm_exact(d, m);
  CHECK(e.mu.mean == doctest::Approx(3.58).epsilon(0.01));
  CHECK(e.mu.sd == doctest::Approx(2.94).epsilon(0.01));
  CHECK(e.mu_q025 == doctest::Approx(-2.30).epsilon(0.04));
  CHECK(e.mu_q975 == doctest::Approx(9.36).epsilon(0.01));
  auto det = o::nnhm_exact_determinacy(d, m, 0.01);
  REQUIRE(det.size() == 2);
  CHECK(det[0].name == "mu");
  CHECK(det[1].name == "log(tau^-2)");
  CHECK(det[0].ted == doctest::Approx(0.105).epsilon(0.05));
  CHECK(det[1].ted < det[0].ted / 100);
  CHECK_THROWS_AS(o::nnhm_exact(d, simulation_model("A")), ModelError);
}

TEST_CASE("sampler reproduces weighted conjugate posteriors") {
  const double sigma0 = 1.5, m0 = 0.5, v0 = 4.0;
  auto x = toy_data(30, 1.0, sigma0, 4);
  auto d = MetaDataset::normal_effects(x, std::vector<double>(x.size(), 1.0));
  // Mean: gamma pinned at sigma0 by a tight prior.
  ModelSpec mean_model{ModelFamily::SimA,
                       {{Role::Mu, DistSpec::normal(m0, v0)},
                        {Role::Gamma, DistSpec::sqrt_inv_gamma(1e6, 1e6 * sigma0 * sigma0)}}};
  // Precision: mu pinned at 1 by a tight prior; gamma^-2 ~ Gamma(a, b).
  const double a = 2.0, b = 3.0;
  ModelSpec prec_model{ModelFamily::SimA,
                       {{Role::Mu, DistSpec::normal(1.0, 1e-14)}, {Role::Gamma, DistSpec::sqrt_inv_gamma(a, b)}}};
  for (double w : {0.9, 1.0, 1.1}) {
    INFO("w=" << w);
    auto ref = o::normal_mean_posterior(x, sigma0, m0, v0, w);
    auto draws = run(mean_model, d, testing::quick_config(20), w);
    auto diag = diagnose(draws);
    auto mu = draws.pooled(0);
    auto s = NormalSummary{};
    for (double v : mu) s.mean += v;
    s.mean /= mu.size();
    double var = 0;
    for (double v : mu) var += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(var / (mu.size() - 1));
    CHECK(std::abs(s.mean - ref.mean) < 3 * diag["mu"].mcse_mean);
    CHECK(std::abs(s.sd - ref.sd) < 3 * diag["mu"].mcse_sd);

    auto pref = o::normal_precision_posterior(x, 1.0, a, b, w);
    auto pd = run(prec_model, d, testing::quick_config(21), w);
    auto pdiag = diagnose(pd);
    // Analysis scale is log(gamma^-2), the log precision.
    auto lp = analysis_chains(pd, 1);
    double n = 0, mean = 0;
    for (const auto& c : lp)
      for (double v : c) mean += v, ++n;
    mean /= n;
    double pv = 0;
    for (const auto& c : lp)
      for (double v : c) pv += (v - mean) * (v - mean);
    double sd = std::sqrt(pv / (n - 1));
    CHECK(std::abs(mean - pref.mean) < 3 * pdiag["log(gamma^-2)"].mcse_mean);
    CHECK(std::abs(sd - pref.sd) < 3 * pdiag["log(gamma^-2)"].mcse_sd);
  }
}

TEST_CASE("oracle checks pass and catch a tampered formula") {
  std::ostringstream out;
  auto results = o::run_checks(out);
  CHECK(results.size() >= 8);
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
  CHECK(out.str().find("TED=0.125") != std::string::npos);

  // Dropping the square root from the spread factor.
  auto tampered = [](const NormalSummary& a, const NormalSummary& b) {
    double v = a.sd * a.sd + b.sd * b.sd;
    return 2 * a.sd * b.sd / v * std::exp(-(a.mean - b.mean) * (a.mean - b.mean) / (4 * v));
  };
  std::ostringstream bad_out;
  auto bad = o::run_checks(bad_out, tampered);
  std::size_t failed = 0;
  for (const auto& r : bad) failed += !r.passed;
  CHECK(failed >= 1);
  CHECK(bad_out.str().find("FAIL") != std::string::npos);
}
