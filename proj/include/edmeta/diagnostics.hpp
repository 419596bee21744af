#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "edmeta/sampler.hpp"

namespace edmeta {

using Chains = std::vector<std::vector<double>>;

// Effective sample size from the pooled-chain autocovariance, truncated by
// Geyer's initial monotone positive sequence; capped at the draw count.
// Throws DiagnosticError for fewer than 100 draws per chain, ragged chains
// or a zero-variance chain.
double ess(const Chains& chains);

// Split-chain potential scale reduction factor. A single chain is split in
// halves like any other.
double split_rhat(const Chains& chains);

struct RankHistogram {
  static constexpr std::size_t kBins = 20;
  std::vector<std::vector<std::size_t>> counts;  // chain x bin
  double chi_square = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Per-chain histogram of ranks over all chains pooled (ties get the average
// rank), with a chi-square test of uniformity across the chain x bin table.
RankHistogram rank_histogram(const Chains& chains);

// Monte Carlo standard errors for the sample mean and sample sd.
double mcse_mean(const Chains& chains);
double mcse_sd(const Chains& chains);

struct ParamDiagnostics {
  std::string name;  // analysis-scale name
  double ess = 0.0;
  double split_rhat = 0.0;
  RankHistogram ranks;
  double mcse_mean = 0.0;
  double mcse_sd = 0.0;
  std::string error;  // non-empty when the diagnostics could not be computed
};

struct ChainDiagnostics {
  std::vector<ParamDiagnostics> params;
  std::vector<std::string> mh_names;
  std::vector<std::vector<double>> acceptance;  // chain x coordinate

  const ParamDiagnostics& operator[](const std::string& name) const;
  double max_rhat() const;
  double min_ess() const;
  double min_rank_p() const;
};

// Diagnostics on the analysis scale (LogPrecision parameters as log(x^-2)).
ChainDiagnostics diagnose(const DrawMatrix& draws);

// Analysis-scale transform of one chain-split column.
Chains analysis_chains(const DrawMatrix& draws, std::size_t param);

}  // namespace edmeta
