#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "edmeta/dataset.hpp"
#include "edmeta/determinacy.hpp"
#include "edmeta/distributions.hpp"
#include "edmeta/models.hpp"

namespace edmeta::oracle {

struct ConjugateResult {
  double w = 1.0;
  double mean = 0.0;
  double sd = 1.0;
  std::string family;  // "normal-mean" or "log-precision"
  // Gamma posterior of the precision; zero for the normal-mean case.
  double shape = 0.0, rate = 0.0;
};

// Normal mean with known sd sigma0 and a Normal(m0, v0) prior; the
// likelihood is raised to w. Empty data is a DataError.
ConjugateResult normal_mean_posterior(std::span<const double> data, double sigma0, double m0,
                                      double v0, double w);

// Precision of a normal with known mean under a Gamma(a, b) prior (rate b).
// mean/sd describe log(precision): digamma(a') - log(b'), sqrt(trigamma(a')).
ConjugateResult normal_precision_posterior(std::span<const double> data, double known_mean,
                                           double a, double b, double w);

// Determinacy from a closed-form moment path w -> (mean, sd).
using MomentPath = std::function<NormalSummary(double w)>;
ParamDeterminacy path_determinacy(const std::string& name, const MomentPath& path, double delta);

// Flat-prior normal mean: mean fixed, sd proportional to w^-1/2. The exact
// answer is TED = 1/8 with all of it in the spread.
ParamDeterminacy flat_normal_mean_determinacy(double delta);

struct GriddedDensity {
  std::vector<double> x;  // strictly increasing
  std::vector<double> p;

  double mass() const;  // trapezoid
  NormalSummary moments() const;
};

// Evaluates `pdf` on n equally spaced points of [lo, hi] and rescales to
// unit trapezoid mass.
GriddedDensity tabulate(const std::function<double(double)>& pdf, double lo, double hi, std::size_t n);

// Density of log(X) on its own grid, given a density of X > 0.
GriddedDensity log_transform(const std::function<double(double)>& pdf, double lo, double hi,
                             std::size_t n);

// Trapezoid integral of sqrt(f g). Both must share the grid and integrate
// to 1 within 1e-6, otherwise DataError.
double quadrature_bc(const GriddedDensity& f, const GriddedDensity& g);

// How far density f is from the normal with summary s, as 1 - BC(f, N(s))
// by quadrature (bc_normal(s, s) is 1). With s = f.moments() it measures
// what moment matching loses on f.
double normal_approx_error(const GriddedDensity& f, const NormalSummary& s);

// Exact marginal posterior summaries of the NNHM with weighted likelihood,
// by integrating mu and theta analytically and log(tau) on a fine grid.
struct NnhmExact {
  NormalSummary mu;
  NormalSummary log_prec;  // log(tau^-2)
  double mu_q025 = 0.0, mu_q50 = 0.0, mu_q975 = 0.0;
};
NnhmExact nnhm_exact(const MetaDataset& d, const ModelSpec& m, double w = 1.0);

// Exact-moment determinacy for mu and log(tau^-2).
std::vector<ParamDeterminacy> nnhm_exact_determinacy(const MetaDataset& d, const ModelSpec& m,
                                                     double delta = 0.01);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

using BcFunction = std::function<double(const NormalSummary&, const NormalSummary&)>;

// Runs every closed-form validation, printing one line per check. `bc`
// replaces the normal BC formula so a tampered formula can be exercised.
std::vector<CheckResult> run_checks(std::ostream& out, const BcFunction& bc = bc_normal);

}  // namespace edmeta::oracle
