#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edmeta/config.hpp"
#include "edmeta/dataset.hpp"
#include "edmeta/determinacy.hpp"
#include "edmeta/diagnostics.hpp"
#include "edmeta/models.hpp"
#include "edmeta/report.hpp"
#include "edmeta/sampler.hpp"

namespace edmeta {

struct AnalysisOptions {
  McmcConfig mcmc;
  double delta = 0.01;
  MethodChoice method = MethodChoice::Reweight;
  bool escalate = true;
  double rhat_threshold = 1.05;
  std::vector<double> sweep_deltas{0.005, 0.01, 0.02};
};
AnalysisOptions analysis_options(const RunConfig& cfg);

struct AnalysisResult {
  ModelSpec model;
  DrawMatrix draws;
  ChainDiagnostics diagnostics;
  std::optional<DeterminacyReport> determinacy;  // empty: partial report
  std::optional<DeterminacyReport> comparison;   // the refit block of method `both`
  std::vector<DeltaSweepRow> sweep;               // empty when reweighting is degenerate
  std::vector<SummaryRow> rows;
  double loglik_audit = 0.0;
  bool rhat_failed = false;
  bool weights_degenerate = false;  // at 1 -/+ delta, whether or not a refit followed
  bool escalated = false;
  std::vector<std::string> warnings;

  // 0 when clean, 2 on R-hat failure or unresolved weight degeneracy.
  int exit_code() const;
};

// Fit, diagnose and compute determinacy. Sampler errors propagate.
AnalysisResult analyze(const ModelSpec& model, const MetaDataset& data, const AnalysisOptions& opt);

Json report_json(const AnalysisResult& r, const RunConfig& cfg, const std::string& data_label);
Json diagnostics_json(const AnalysisResult& r, double rhat_threshold);

struct TransitionRun {
  double target = 0.0;
  double scale = 0.0;
  std::string parametrization;
  std::optional<AnalysisResult> result;
  std::string error;
};
struct TransitionResult {
  RlmcGrid grid;
  std::vector<TransitionRun> runs;
  std::vector<TransitionRow> rows;
};
// HN or HC prior on tau at each solved scale, the mu prior from the
// configured model, every configured parametrization.
TransitionResult transition(const RunConfig& cfg, const MetaDataset& data);

struct SimulationResult {
  std::vector<MetaDataset> datasets;  // one per replicate
  std::vector<SimulationRow> rows;
};
// Replicate r draws its data from stream 1000 + r of the run seed.
SimulationResult simulate(const RunConfig& cfg);
MetaDataset simulation_dataset(const RunConfig& cfg, std::size_t replicate);

// Command entry points. They write their outputs under cfg.out, a short
// summary on `out` and errors on `err`, and return the process exit code:
// 1 for input, configuration or I/O errors (nothing written), 2 for
// diagnostic failures (outputs written and flagged). simulate returns 0
// once every model has been attempted; its flags live in the CSV.
int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_transition(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_oracle_check(std::ostream& out);

}  // namespace edmeta
