#include "edmeta/special.hpp"

#include <cmath>

#include "edmeta/error.hpp"

namespace edmeta {

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError("digamma: argument must be positive and finite");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double r = 1.0 / (x * x);
  // Bernoulli terms B_2n / (2n x^2n)
  double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 -
                r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
  return acc + std::log(x) - 0.5 / x - series;
}

double trigamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError("trigamma: argument must be positive and finite");
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  double r = 1.0 / (x * x);
  double series =
      1.0 / 6 -
      r * (1.0 / 30 - r * (1.0 / 42 - r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730 - r * 7.0 / 6)))));
  return acc + 1.0 / x + 0.5 * r + series * r / x;
}

}  // namespace edmeta
