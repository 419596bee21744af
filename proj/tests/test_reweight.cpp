#include <doctest.h>

#include <cmath>
#include <numeric>

#include "edmeta/diagnostics.hpp"
#include "edmeta/error.hpp"
#include "edmeta/reweight.hpp"
#include "edmeta/rng.hpp"

using namespace edmeta;

namespace {

// One-parameter draw matrix with the given values and log-likelihoods split
// evenly over `chains`.
DrawMatrix synthetic(const std::vector<double>& values, const std::vector<double>& loglik,
                     std::size_t chains = 1, ScaleTag tag = ScaleTag::Identity,
                     const std::string& name = "mu") {
  DrawMatrix d;
  d.layout.names = {name};
  d.layout.scale_tags = {tag};
  std::size_t per = values.size() / chains;
  for (std::size_t c = 0; c < chains; ++c) {
    ChainDraws ch;
    ch.values.assign(values.begin() + c * per, values.begin() + (c + 1) * per);
    ch.loglik.assign(loglik.begin() + c * per, loglik.begin() + (c + 1) * per);
    d.chains.push_back(std::move(ch));
  }
  return d;
}

}  // namespace

TEST_CASE("log weights") {
  std::vector<double> ll{0.0, std::log(3.0)};
  auto one = log_weights(ll, 1.0);
  CHECK(one == std::vector<double>{0.0, 0.0});
  auto two = log_weights(ll, 2.0);
  CHECK(two[0] == doctest::Approx(-std::log(3.0)).epsilon(1e-15));
  CHECK(two[1] == 0.0);
  // Deviance form gives the same weights.
  double w = 1.37;
  std::vector<double> dev{-2 * ll[0], -2 * ll[1]};
  auto lw = log_weights(ll, w);
  double c0 = std::exp(-dev[0] * (w - 1) / 2), c1 = std::exp(-dev[1] * (w - 1) / 2);
  CHECK(std::exp(lw[0] - lw[1]) == doctest::Approx(c0 / c1).epsilon(1e-14));
  CHECK_THROWS_AS(log_weights(std::vector<double>{0.0, NAN}, 1.1), DataError);
  CHECK_THROWS_AS(log_weights(std::vector<double>{0.0, -INFINITY}, 1.1), DataError);
  CHECK_THROWS_AS(log_weights(ll, 0.0), ParameterError);
}

TEST_CASE("hand example of weighted moments") {
  std::vector<double> x{0.0, 1.0};
  std::vector<double> lw{0.0, std::log(3.0)};
  auto m = weighted_moments(x, lw);
  CHECK(m.mean == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.sd == doctest::Approx(std::sqrt(0.1875)).epsilon(1e-14));
  CHECK(m.sd == doctest::Approx(0.4330).epsilon(1e-4));
  CHECK(kish_ess(lw) == doctest::Approx(16.0 / 10.0).epsilon(1e-14));
}

TEST_CASE("w = 1 gives plain sample moments") {
  RngStream rng(3);
  std::vector<double> x(5000), ll(5000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 2 + rng.normal();
    ll[i] = -0.5 * x[i] * x[i] + rng.normal();
  }
  auto wm = weighted_moments(synthetic(x, ll, 2), 1.0);
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  CHECK(wm.params[0].mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(wm.params[0].sd == doctest::Approx(std::sqrt(var / x.size())).epsilon(1e-12));
  CHECK(wm.kish_ess == doctest::Approx(5000).epsilon(1e-12));
  CHECK(wm.names[0] == "mu");
  CHECK_FALSE(wm.degeneracy_warning);
}

TEST_CASE("constant shift and constant loglik") {
  RngStream rng(4);
  std::vector<double> x(1000), ll(1000), shifted(1000), flat(1000, -12.5);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    ll[i] = -0.5 * (x[i] - 1) * (x[i] - 1);
    shifted[i] = ll[i] + 1234.5;
  }
  for (double w : {0.9, 1.01, 1.3}) {
    auto a = weighted_moments(synthetic(x, ll), w);
    auto b = weighted_moments(synthetic(x, shifted), w);
    CHECK(a.params[0].mean == doctest::Approx(b.params[0].mean).epsilon(1e-12));
    CHECK(a.params[0].sd == doctest::Approx(b.params[0].sd).epsilon(1e-12));
  }
  auto [lo, hi] = moments_pair(synthetic(x, flat), 0.01);
  auto base = weighted_moments(synthetic(x, flat), 1.0);
  CHECK(lo.params[0].mean == doctest::Approx(base.params[0].mean).epsilon(1e-14));
  CHECK(hi.params[0].sd == doctest::Approx(base.params[0].sd).epsilon(1e-14));
  CHECK(lo.w == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(hi.w == doctest::Approx(1.01).epsilon(1e-15));
}

TEST_CASE("monotone drift on a location toy") {
  RngStream rng(5);
  std::vector<double> x(20000), ll(20000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    ll[i] = 0.8 * x[i];
  }
  auto d = synthetic(x, ll, 4);
  double m09 = weighted_moments(d, 0.9).params[0].mean;
  double m1 = weighted_moments(d, 1.0).params[0].mean;
  double m11 = weighted_moments(d, 1.1).params[0].mean;
  CHECK(m09 < m1);
  CHECK(m1 < m11);
}

TEST_CASE("two-point discrete posterior") {
  // Base posterior puts 1/4 on 0 and 3/4 on 1; likelihoods (0.2, 0.6).
  std::vector<double> x{0, 1, 1, 1}, ll(4);
  for (std::size_t i = 0; i < 4; ++i) ll[i] = std::log(x[i] == 0 ? 0.2 : 0.6);
  for (double w : {0.5, 0.99, 1.01, 2.0}) {
    double a = 0.25 * std::pow(0.2, w - 1), b = 0.75 * std::pow(0.6, w - 1);
    double p1 = b / (a + b);
    auto wm = weighted_moments(std::span<const double>(x), log_weights(ll, w));
    CHECK(wm.mean == doctest::Approx(p1).epsilon(1e-12));
    CHECK(wm.sd == doctest::Approx(std::sqrt(p1 * (1 - p1))).epsilon(1e-12));
  }
}

TEST_CASE("log-precision parameters are weighted on the analysis scale") {
  std::vector<double> tau{0.5, 1.0, 2.0, 4.0}, ll{0, 0, 0, 0};
  auto wm = weighted_moments(synthetic(tau, ll, 1, ScaleTag::LogPrecision, "tau"), 1.0);
  CHECK(wm.names[0] == "log(tau^-2)");
  double m = 0;
  for (double t : tau) m += -2 * std::log(t);
  CHECK(wm.params[0].mean == doctest::Approx(m / 4).epsilon(1e-14));
  auto a = analysis_draws(synthetic(tau, ll, 1, ScaleTag::LogPrecision, "tau"), 0);
  CHECK(a[3] == doctest::Approx(-2 * std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("degeneracy guard") {
  RngStream rng(6);
  std::vector<double> x(1000), ll(1000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    ll[i] = 40 * x[i];
  }
  CHECK_THROWS_AS(weighted_moments(synthetic(x, ll), 1.5), DegenerateWeightsError);
  // Moderate spread: warning only.
  for (auto& v : ll) v /= 40;
  auto warn = weighted_moments(synthetic(x, ll), 2.0);
  CHECK(warn.kish_ess < 0.5 * 1000);
  CHECK(warn.kish_ess > 0.05 * 1000);
  CHECK(warn.degeneracy_warning);
  CHECK_THROWS_AS(weighted_moments(synthetic(x, ll), -1.0), ParameterError);
  CHECK_THROWS_AS(moments_pair(synthetic(x, ll), 1.5), ParameterError);
}

TEST_CASE("eight schools reweighting matches a direct refit") {
  auto m = eight_schools_model(ModelFamily::NNHMCentered);
  McmcConfig cfg;
  auto base = run(m, eight_schools(), cfg);
  auto wm = weighted_moments(base, 1.01);
  CHECK(wm.kish_ess >= 0.99 * base.total());
  auto [lo, hi] = moments_pair(base, 0.01);
  CHECK(lo.kish_ess >= 0.99 * base.total());
  CHECK(hi.kish_ess >= 0.99 * base.total());

  // Refit at w = 1.01 with an independent seed so the MCSEs combine.
  auto cfg2 = cfg;
  cfg2.seed = cfg.seed + 1;
  auto refit = run(m, eight_schools(), cfg2, 1.01);
  auto refit_m = weighted_moments(refit, 1.0);
  auto db = diagnose(base), dr = diagnose(refit);
  double se = std::hypot(db["mu"].mcse_mean, dr["mu"].mcse_mean);
  CHECK(std::abs(wm.params[0].mean - refit_m.params[0].mean) < 3 * se);
  double se_sd = std::hypot(db["mu"].mcse_sd, dr["mu"].mcse_sd);
  CHECK(std::abs(wm.params[0].sd - refit_m.params[0].sd) < 3 * se_sd);
}
