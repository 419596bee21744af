#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edmeta/dataset.hpp"
#include "edmeta/models.hpp"
#include "edmeta/reweight.hpp"
#include "edmeta/sampler.hpp"

namespace edmeta {

// Moment-matched normal summary on the analysis scale.
struct NormalSummary {
  double mean = 0.0;
  double sd = 1.0;
};

// Bhattacharyya coefficient between two normals:
//   sqrt(2 sa sb / (sa^2 + sb^2)) * exp(-(mb - ma)^2 / (4 (sa^2 + sb^2)))
// Throws ParameterError for a non-positive sd.
double bc_normal(const NormalSummary& a, const NormalSummary& b);

// BC = location * spread, each factor in (0, 1].
struct BcFactors {
  double location = 1.0;
  double spread = 1.0;
};
BcFactors bc_split(const NormalSummary& a, const NormalSummary& b);

// (2 - bc_plus - bc_minus) / delta^2: minus the central second difference
// of a curve equal to 1 at the centre. Non-negative for BC values.
double second_diff(double bc_minus, double bc_plus, double delta);

enum class Method { Reweight, Refit };
std::string_view to_string(Method m);

struct ParamDeterminacy {
  std::string name;  // analysis-scale name
  NormalSummary base;
  NormalSummary minus, plus;  // moment-matched weighted posteriors at 1 -/+ delta
  BcFactors bc_minus, bc_plus;
  double ted = 0.0, edl = 0.0, eds = 0.0;
  std::optional<double> pedl, peds;  // undefined when ted == 0
  bool noise_flag = false;           // BC change at machine-precision level
  double ted_full_bc = 0.0;          // audit: second difference of the unsplit BC
  double q025 = 0.0, q50 = 0.0, q975 = 0.0;
};

struct DeterminacyReport {
  double delta = 0.01;
  Method method = Method::Reweight;
  std::vector<ParamDeterminacy> params;
  double kish_ess_minus = 0.0, kish_ess_plus = 0.0;
  double draws = 0.0;
  std::vector<std::string> warnings;

  const ParamDeterminacy& operator[](const std::string& name) const;
};

// Determinacy for one parameter from its three moment-matched summaries.
ParamDeterminacy determinacy_from_summaries(const std::string& name, const NormalSummary& base,
                                            const NormalSummary& minus, const NormalSummary& plus,
                                            double delta);

struct RefitInputs {
  const ModelSpec& model;
  const MetaDataset& data;
  McmcConfig config;
};

// Reweight: weighted moments of `draws` at 1 -/+ delta. Refit: two more
// sampler runs at 1 -/+ delta with the same seed; needs `refit`.
// delta must lie in (0, 0.1].
DeterminacyReport determinacy(const DrawMatrix& draws, double delta, Method method = Method::Reweight,
                              const RefitInputs* refit = nullptr);

// TED at several step sizes plus a Richardson extrapolation from the two
// smallest, (4 T(d) - T(2d)) / 3, when they differ by a factor of two.
struct DeltaSweepRow {
  std::string name;
  std::vector<double> ted;
  std::optional<double> richardson;
};
std::vector<DeltaSweepRow> delta_sweep(const DrawMatrix& draws, const std::vector<double>& deltas);

// Type-7 sample quantile.
double quantile(std::vector<double> values, double prob);

}  // namespace edmeta
