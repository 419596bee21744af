#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "edmeta/dataset.hpp"
#include "edmeta/models.hpp"

namespace edmeta {

struct McmcConfig {
  std::size_t chains = 4;
  std::size_t iterations = 400000;  // per chain, including burn-in
  std::size_t burn_in = 200000;
  std::size_t thin = 100;
  std::uint64_t seed = 2021;
  std::size_t adapt_window = 100;  // Robbins-Monro gain decay length
  std::size_t threads = 0;         // 0: one per chain, bounded by the hardware

  std::size_t kept_per_chain() const { return (iterations - burn_in) / thin; }
  void validate() const;  // throws ParameterError

  bool operator==(const McmcConfig&) const = default;
};

struct ChainDraws {
  std::vector<double> values;  // kept x params, row-major in layout order
  std::vector<double> loglik;  // unweighted log-likelihood per kept draw
  // Post-burn-in acceptance rate per Metropolis-updated coordinate.
  std::vector<std::string> mh_names;
  std::vector<double> acceptance;
};

struct DrawMatrix {
  ParamLayout layout;
  McmcConfig config;
  double weight = 1.0;
  std::vector<ChainDraws> chains;

  std::size_t n_chains() const { return chains.size(); }
  std::size_t kept_per_chain() const { return chains.empty() ? 0 : chains[0].loglik.size(); }
  std::size_t total() const { return n_chains() * kept_per_chain(); }

  double at(std::size_t chain, std::size_t draw, std::size_t param) const {
    return chains[chain].values[draw * layout.size() + param];
  }
  std::vector<double> column(std::size_t chain, std::size_t param) const;
  std::vector<std::vector<double>> per_chain(std::size_t param) const;
  // Chains concatenated in chain order.
  std::vector<double> pooled(std::size_t param) const;
  std::vector<double> pooled_loglik() const;
};

// Draws from the posterior with the likelihood raised to `weight`.
// Deterministic in (model, data, cfg, weight) whatever cfg.threads is.
// Throws SamplingError when a scale parameter runs past 1e12 or a
// Metropolis coordinate accepts under 1% after adaptation.
DrawMatrix run(const ModelSpec& m, const MetaDataset& d, const McmcConfig& cfg, double weight = 1.0);

// Largest relative deviation between stored and recomputed log-likelihoods.
double audit_loglik(const ModelSpec& m, const MetaDataset& d, const DrawMatrix& draws);

// CSV `chain,iter,<param...>,loglik`.
void write_draws_csv(std::ostream& out, const DrawMatrix& draws);
DrawMatrix read_draws_csv(std::istream& in, const std::string& name);

}  // namespace edmeta
