#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "edmeta/dataset.hpp"
#include "edmeta/distributions.hpp"
#include "edmeta/error.hpp"
#include "edmeta/rlmc.hpp"

using namespace edmeta;

namespace {
const std::vector<double> kTargets{0.05, 0.25, 0.5, 0.75, 0.95};
}

TEST_CASE("rlmc values") {
  auto s = eight_schools().sigma;
  CHECK(rlmc(0.0, s) == 0.0);
  CHECK(rlmc(1e6 * 18, s) >= 1 - 1e-9);
  CHECK(rlmc(1e6 * 18, s) < 1.0);
  double tau = median(DistSpec::half_normal(5));
  CHECK(rlmc(tau, s) == doctest::Approx(0.078).epsilon(0.01));
  CHECK(std::abs(rlmc(tau, s) - 0.08) < 0.005);
  std::vector<double> one{2.0};
  CHECK(rlmc(2.0, one) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rlmc_reference(2.0, one) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rlmc_value(RlmcFunctional::StudyAverage, tau, s) == rlmc(tau, s));
  CHECK(rlmc_value(RlmcFunctional::GeometricReference, tau, s) == rlmc_reference(tau, s));
}

TEST_CASE("rlmc errors") {
  std::vector<double> empty, bad{1.0, 0.0};
  CHECK_THROWS_AS(rlmc(1.0, empty), DataError);
  CHECK_THROWS_AS(rlmc(1.0, bad), DataError);
  CHECK_THROWS_AS(rlmc_reference(1.0, empty), DataError);
  CHECK_THROWS_AS(rlmc(-1.0, eight_schools().sigma), ParameterError);
  auto s = eight_schools().sigma;
  CHECK_THROWS_AS(solve_scale(0.0, s, Family::HalfNormal), ParameterError);
  CHECK_THROWS_AS(solve_scale(1.0, s, Family::HalfNormal), ParameterError);
  CHECK_THROWS_AS(solve_scale(0.5, s, Family::Normal), ParameterError);
}

TEST_CASE("monotonicity and scale equivariance") {
  auto s = eight_schools().sigma;
  for (auto f : {RlmcFunctional::StudyAverage, RlmcFunctional::GeometricReference}) {
    double prev = -1;
    for (double tau = 0; tau < 200; tau += 0.5) {
      double v = rlmc_value(f, tau, s);
      CHECK(v > prev);
      prev = v;
    }
    auto scaled = s;
    for (auto& x : scaled) x *= 3.7;
    CHECK(rlmc_value(f, 3.7 * 6.0, scaled) == doctest::Approx(rlmc_value(f, 6.0, s)).epsilon(1e-14));
  }
}

TEST_CASE("published scale grid") {
  auto s = eight_schools().sigma;
  const std::vector<double> published{4.1, 10.4, 18, 31.2, 78.4};
  auto grid = solve_grid(kTargets, s, Family::HalfNormal);
  REQUIRE(grid.solved_scales.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    INFO("target " << kTargets[i]);
    CHECK(grid.solved_scales[i] == doctest::Approx(published[i]).epsilon(0.02));
    CHECK(std::abs(rlmc_at_median(grid.solved_scales[i], s, Family::HalfNormal) - kTargets[i]) < 1e-6);
    if (i) CHECK(grid.solved_scales[i] > grid.solved_scales[i - 1]);
  }
  CHECK(grid.functional == RlmcFunctional::GeometricReference);
  CHECK(grid.sigmas == s);
}

TEST_CASE("round trips for every functional and family") {
  auto s = eight_schools().sigma;
  for (auto fam : {Family::HalfNormal, Family::HalfCauchy})
    for (auto f : {RlmcFunctional::StudyAverage, RlmcFunctional::GeometricReference})
      for (double t : kTargets) {
        double c = solve_scale(t, s, fam, f);
        CHECK(c > 0);
        CHECK(std::abs(rlmc_at_median(c, s, fam, f) - t) < 1e-6);
      }
  // Extreme targets still bracket.
  CHECK(std::abs(rlmc_at_median(solve_scale(1e-4, s, Family::HalfNormal), s, Family::HalfNormal) - 1e-4) < 1e-6);
  CHECK(std::abs(rlmc_at_median(solve_scale(0.999, s, Family::HalfCauchy), s, Family::HalfCauchy) - 0.999) <
        1e-6);
}

TEST_CASE("grid CSV") {
  auto grid = solve_grid({0.25, 0.75}, eight_schools().sigma, Family::HalfNormal);
  std::ostringstream out;
  write_grid_csv(out, grid);
  auto text = out.str();
  CHECK(text.rfind("target,scale\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
