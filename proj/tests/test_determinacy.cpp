#include <doctest.h>

#include <cmath>

#include "edmeta/determinacy.hpp"
#include "edmeta/error.hpp"
#include "edmeta/rng.hpp"
#include "test_util.hpp"

using namespace edmeta;

namespace {

NormalSummary summarize(const std::vector<double>& x) {
  double m = 0, s = 0;
  for (double v : x) m += v;
  m /= x.size();
  for (double v : x) s += (v - m) * (v - m);
  return {m, std::sqrt(s / (x.size() - 1))};
}

}  // namespace

TEST_CASE("bc_normal examples") {
  CHECK(bc_normal({0, 1}, {0, 1}) == 1.0);
  CHECK(bc_normal({2.5, 0.3}, {2.5, 0.3}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bc_normal({0, 1}, {1, 1}) == doctest::Approx(std::exp(-1.0 / 8)).epsilon(1e-15));
  CHECK(bc_normal({0, 1}, {1, 1}) == doctest::Approx(0.8825).epsilon(1e-4));
  CHECK(bc_normal({0, 1}, {0, 2}) == doctest::Approx(std::sqrt(4.0 / 5)).epsilon(1e-15));
  CHECK(bc_normal({0, 1}, {0, 2}) == doctest::Approx(0.8944).epsilon(1e-4));
  CHECK_THROWS_AS(bc_normal({0, 0}, {0, 1}), ParameterError);
  CHECK_THROWS_AS(bc_normal({0, 1}, {0, -1}), ParameterError);
}

TEST_CASE("bc_split examples") {
  auto eq_sd = bc_split({0, 1}, {3, 1});
  CHECK(eq_sd.spread == 1.0);
  auto eq_mean = bc_split({1, 1}, {1, 3});
  CHECK(eq_mean.location == 1.0);
  auto f = bc_split({0, 1}, {1, 2});
  CHECK(f.spread == doctest::Approx(std::sqrt(4.0 / 5)).epsilon(1e-15));
  CHECK(f.location == doctest::Approx(std::exp(-1.0 / 20)).epsilon(1e-15));
}

TEST_CASE("product identity on random pairs") {
  RngStream rng(7);
  for (int i = 0; i < 10000; ++i) {
    NormalSummary a{rng.normal() * 5, std::exp(rng.normal())};
    NormalSummary b{rng.normal() * 5, std::exp(rng.normal())};
    auto f = bc_split(a, b);
    double bc = bc_normal(a, b);
    REQUIRE(std::abs(f.location * f.spread - bc) <= 1e-14);
    // Strictly positive in exact arithmetic; far-apart pairs underflow in double.
    double exponent = (a.mean - b.mean) * (a.mean - b.mean) / (4 * (a.sd * a.sd + b.sd * b.sd));
    if (exponent < 700) REQUIRE(f.location > 0);
    REQUIRE(f.location >= 0);
    REQUIRE(f.location <= 1);
    REQUIRE(f.spread > 0);
    REQUIRE(f.spread <= 1);
    REQUIRE(bc <= 1);
    REQUIRE(bc_normal(b, a) == doctest::Approx(bc).epsilon(1e-15));
  }
}

TEST_CASE("second difference") {
  CHECK(second_diff(1, 1, 0.01) == 0.0);
  double d = 0.01, a = 0.05;
  CHECK(second_diff(1 - a * d * d, 1 - a * d * d, d) == doctest::Approx(0.1).epsilon(1e-9));
  // Pure sqrt(w) spread family: analytic TED is 1/8.
  auto bc = [](double w) { return std::sqrt(2 * std::sqrt(w) / (w + 1)); };
  CHECK(std::abs(second_diff(bc(1 - d), bc(1 + d), d) - 0.125) < 1e-4);
  NormalSummary base{0, 1};
  auto p = determinacy_from_summaries("x", base, {0, 1 / std::sqrt(1 - d)}, {0, 1 / std::sqrt(1 + d)}, d);
  CHECK(std::abs(p.ted - 0.125) < 1e-4);
  CHECK(p.edl == 0.0);
  REQUIRE(p.peds);
  CHECK(*p.peds == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("derivative split identity on an analytic path") {
  // mu_w = 0.7 (w - 1) + 0.2 (w - 1)^2, sigma_w = 1.3 / sqrt(w).
  auto summary = [](double w) {
    double e = w - 1;
    return NormalSummary{0.7 * e + 0.2 * e * e, 1.3 / std::sqrt(w)};
  };
  const NormalSummary base = summary(1.0);
  auto full = [&](double w) { return bc_normal(base, summary(w)); };
  auto loc = [&](double w) { return bc_split(base, summary(w)).location; };
  auto spr = [&](double w) { return bc_split(base, summary(w)).spread; };
  for (double d : {0.02, 0.01, 0.005}) {
    double total = second_diff(full(1 - d), full(1 + d), d);
    double split = second_diff(loc(1 - d), loc(1 + d), d) + second_diff(spr(1 - d), spr(1 + d), d);
    INFO("delta=" << d);
    CHECK(std::abs(total - split) <= 10 * d * d * std::abs(total));
    CHECK(std::abs((loc(1 + d) - loc(1 - d)) / (2 * d)) < d);
    CHECK(std::abs((spr(1 + d) - spr(1 - d)) / (2 * d)) < d);
  }
  // Analytic: BC_L'' = -mu'^2 / (2 sigma^2 * 2) and BC_S'' = -1/8 for this sd path.
  double expect = 0.7 * 0.7 / (4 * 1.3 * 1.3) + 0.125;
  auto p = determinacy_from_summaries("x", base, summary(0.99), summary(1.01), 0.01);
  CHECK(p.ted == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("affine invariance") {
  RngStream rng(9);
  std::vector<double> x(3000), y(3000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    y[i] = 0.3 + 1.4 * rng.normal();
  }
  double bc = bc_normal(summarize(x), summarize(y));
  for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{-0.5, 10.0}, std::pair{1e3, -7.0}}) {
    auto tx = x, ty = y;
    for (auto& v : tx) v = a * v + b;
    for (auto& v : ty) v = a * v + b;
    CHECK(bc_normal(summarize(tx), summarize(ty)) == doctest::Approx(bc).epsilon(1e-12));
  }
}

TEST_CASE("report identities and null proportions") {
  RngStream rng(10);
  for (int i = 0; i < 200; ++i) {
    NormalSummary base{rng.normal(), std::exp(0.3 * rng.normal())};
    NormalSummary lo{base.mean + 0.01 * rng.normal(), base.sd * std::exp(0.01 * rng.normal())};
    NormalSummary hi{base.mean + 0.01 * rng.normal(), base.sd * std::exp(0.01 * rng.normal())};
    auto p = determinacy_from_summaries("p", base, lo, hi, 0.01);
    REQUIRE(p.ted == p.edl + p.eds);
    REQUIRE(p.edl >= 0);
    REQUIRE(p.eds >= 0);
    REQUIRE(p.pedl);
    REQUIRE(*p.pedl + *p.peds == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto zero = determinacy_from_summaries("z", {1, 2}, {1, 2}, {1, 2}, 0.01);
  CHECK(zero.ted == 0.0);
  CHECK_FALSE(zero.pedl);
  CHECK_FALSE(zero.peds);
  CHECK(zero.noise_flag);
}

TEST_CASE("TED ratio is invariant to common affine rescaling") {
  auto a = determinacy_from_summaries("a", {0, 1}, {-0.004, 1.003}, {0.005, 0.996}, 0.01);
  auto b = determinacy_from_summaries("b", {2, 3}, {1.99, 3.01}, {2.02, 2.99}, 0.01);
  auto scale = [](NormalSummary s) { return NormalSummary{5 * s.mean - 2, 5 * s.sd}; };
  auto a2 = determinacy_from_summaries("a", scale({0, 1}), scale({-0.004, 1.003}), scale({0.005, 0.996}), 0.01);
  auto b2 = determinacy_from_summaries("b", scale({2, 3}), scale({1.99, 3.01}), scale({2.02, 2.99}), 0.01);
  CHECK(a.ted / b.ted == doctest::Approx(a2.ted / b2.ted).epsilon(1e-10));
}

TEST_CASE("delta validation") {
  auto m = eight_schools_model(ModelFamily::NNHMCentered);
  auto draws = run(m, eight_schools(), testing::quick_config(1, 200));
  CHECK_THROWS_AS(determinacy(draws, 0.0), ParameterError);
  CHECK_THROWS_AS(determinacy(draws, 0.2), ParameterError);
  CHECK_THROWS_AS(determinacy(draws, -0.01), ParameterError);
  CHECK_THROWS_AS(determinacy(draws, 0.01, Method::Refit, nullptr), ParameterError);
  CHECK_NOTHROW(determinacy(draws, 0.1));
}

TEST_CASE("quantiles") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4}, 0.0) == 1);
  CHECK(quantile({1, 2, 3, 4}, 1.0) == 4);
  CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("eight schools determinacy") {
  auto m = eight_schools_model(ModelFamily::NNHMCentered);
  auto draws = run(m, eight_schools(), McmcConfig{});
  auto r = determinacy(draws, 0.01);
  CHECK(r.method == Method::Reweight);
  CHECK(r.kish_ess_minus >= 0.99 * draws.total());
  const auto& mu = r["mu"];
  CHECK(mu.ted >= 0.095);
  CHECK(mu.ted <= 0.115);
  REQUIRE(mu.pedl);
  CHECK(*mu.pedl == doctest::Approx(0.82).epsilon(0.05));
  CHECK(*mu.peds == doctest::Approx(0.18).epsilon(0.25));
  CHECK(mu.ted == mu.edl + mu.eds);
  CHECK(std::abs(mu.ted_full_bc - mu.ted) < 0.01 * mu.ted);
  const auto& lt = r["log(tau^-2)"];
  CHECK(lt.ted * 100 <= mu.ted);
  CHECK(mu.q025 < mu.q50);
  CHECK(mu.q50 < mu.q975);

  auto sweep = delta_sweep(draws, {0.005, 0.01, 0.02});
  REQUIRE(sweep.size() == draws.layout.size());
  CHECK(sweep[0].name == "mu");
  REQUIRE(sweep[0].ted.size() == 3);
  CHECK(sweep[0].ted[1] == doctest::Approx(mu.ted).epsilon(1e-12));
  REQUIRE(sweep[0].richardson);
  CHECK(*sweep[0].richardson == doctest::Approx((4 * sweep[0].ted[0] - sweep[0].ted[1]) / 3).epsilon(1e-12));
  CHECK(std::abs(sweep[0].ted[2] - sweep[0].ted[0]) < 0.05 * mu.ted);
}

TEST_CASE("refit method agrees with reweighting") {
  auto m = eight_schools_model(ModelFamily::NNHMCentered);
  McmcConfig cfg;
  auto draws = run(m, eight_schools(), cfg);
  RefitInputs in{m, eight_schools(), cfg};
  auto refit = determinacy(draws, 0.01, Method::Refit, &in);
  auto rw = determinacy(draws, 0.01, Method::Reweight);
  CHECK(refit.method == Method::Refit);
  CHECK(refit["mu"].ted == doctest::Approx(rw["mu"].ted).epsilon(0.25));
  CHECK(refit["mu"].ted == refit["mu"].edl + refit["mu"].eds);
}
