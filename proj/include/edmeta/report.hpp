#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "edmeta/determinacy.hpp"
#include "edmeta/diagnostics.hpp"
#include "edmeta/sampler.hpp"

namespace edmeta {

using Json = nlohmann::ordered_json;

// One line of the posterior summary. NaN marks an undefined or
// unavailable value (written as NA in CSV and null in JSON).
struct SummaryRow {
  std::string param;
  double mean = 0.0, sd = 0.0, q025 = 0.0, q50 = 0.0, q975 = 0.0;
  double ted = 0.0, edl = 0.0, eds = 0.0, pedl = 0.0, peds = 0.0;
  double ess = 0.0;
  bool noise_flag = false;
  double ted_full_bc = 0.0;

  bool operator==(const SummaryRow&) const;
};

// Posterior columns come from the draws; determinacy columns from `det`,
// or NaN when it is null (partial report).
std::vector<SummaryRow> summary_rows(const DrawMatrix& draws, const ChainDiagnostics& diag,
                                     const DeterminacyReport* det);

// param,mean,sd,q0.025,q0.5,q0.975,TED,EDL,EDS,pEDL,pEDS,ESS
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in, const std::string& name);

Json to_json(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> rows_from_json(const Json& parameters);

Json to_json(const ChainDiagnostics& diag);
ChainDiagnostics diagnostics_from_json(const Json& j);

Json to_json(const std::vector<DeltaSweepRow>& sweep, const std::vector<double>& deltas);

// Pretty-printed with a trailing newline.
void write_json(std::ostream& out, const Json& j);
Json read_json(std::istream& in, const std::string& name);

// Long-format transition phase table.
struct TransitionRow {
  double rlmc_target = 0.0;
  double scale = 0.0;
  std::string parametrization;
  std::string param;
  double ted = 0.0, pedl = 0.0, peds = 0.0;
  std::string status = "ok";

  bool operator==(const TransitionRow&) const;
};
// rlmc_target,scale,parametrization,param,ted,pedl,peds,status
void write_transition_csv(std::ostream& out, const std::vector<TransitionRow>& rows);
std::vector<TransitionRow> read_transition_csv(std::istream& in, const std::string& name);

// Simulation results, one row per model and replicate.
// Determinacy columns for mu and log(x^-2) of sigma, tau, gamma; ESS columns
// for the raw parameters. Missing parameters are NaN.
struct SimulationRow {
  std::string model;
  std::size_t replicate = 0;
  std::string method;
  double ted_mu = NAN, ted_sigma = NAN, ted_tau = NAN, ted_gamma = NAN;
  double pedl_mu = NAN, peds_mu = NAN, pedl_sigma = NAN, peds_sigma = NAN;
  double pedl_tau = NAN, peds_tau = NAN, pedl_gamma = NAN, peds_gamma = NAN;
  double ess_mu = NAN, ess_sigma = NAN, ess_tau = NAN, ess_gamma = NAN;
  double max_rhat = NAN, min_ess = NAN;
  std::string flags;   // ';'-separated diagnostic flags, empty when clean
  std::string status = "ok";

  bool operator==(const SimulationRow&) const;
};
void write_simulation_csv(std::ostream& out, const std::vector<SimulationRow>& rows);
std::vector<SimulationRow> read_simulation_csv(std::istream& in, const std::string& name);
// model,replicate,mu,sigma,tau,gamma
void write_ess_csv(std::ostream& out, const std::vector<SimulationRow>& rows);

}  // namespace edmeta
