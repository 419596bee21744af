#pragma once

namespace edmeta {

// Digamma and trigamma for x > 0: upward recurrence to x >= 10, then the
// asymptotic series. Absolute error below 1e-12 over the domain.
double digamma(double x);
double trigamma(double x);

}  // namespace edmeta
