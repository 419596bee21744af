#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edmeta/dataset.hpp"
#include "edmeta/distributions.hpp"
#include "edmeta/rng.hpp"

namespace edmeta {

enum class ModelFamily { NNHMCentered, NNHMNonCentered, LogitRE, SimA, SimB, SimC };
enum class Role { Mu, Tau, Sigma, Gamma, Alpha, Beta };

struct ModelSpec {
  ModelFamily family = ModelFamily::NNHMCentered;
  std::map<Role, DistSpec> priors;

  const DistSpec& prior(Role r) const;
};

enum class ScaleTag { Identity, LogPrecision };

// Ordered parameter names. Scale parameters carry LogPrecision and are
// analysed as log(x^-2).
struct ParamLayout {
  std::vector<std::string> names;
  std::vector<ScaleTag> scale_tags;

  std::size_t size() const { return names.size(); }
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index(std::string_view name) const;  // throws DimensionError
  // `mu`, `log(tau^-2)`, ...
  std::string analysis_name(std::size_t i) const;

  bool operator==(const ParamLayout&) const = default;
};

// Where each role lives in a parameter vector; -1 when absent. Random
// effects (theta, theta_tilde or eta) are contiguous from `effects`.
struct LayoutIndex {
  int mu = -1, tau = -1, sigma = -1, gamma = -1, alpha = -1, beta = -1;
  int effects = -1;
  std::size_t n_effects = 0;
};

std::string_view to_string(ModelFamily f);
ModelFamily parse_model_family(std::string_view name);
std::string_view to_string(Role r);
Role parse_role(std::string_view name);

std::vector<Role> required_roles(ModelFamily f);
DataKind data_kind_for(ModelFamily f);

// Throws ModelError for missing roles, non-normal location priors or scale
// priors without positive support.
void validate(const ModelSpec& m);

ParamLayout layout(const ModelSpec& m, const MetaDataset& d);
LayoutIndex layout_index(const ModelSpec& m, const MetaDataset& d);

using ParamVector = std::span<const double>;

// Log-likelihood of the observations given all parameters, unweighted.
double log_likelihood(const ModelSpec& m, const MetaDataset& d, ParamVector p);
double log_latent(const ModelSpec& m, const MetaDataset& d, ParamVector p);
double log_prior(const ModelSpec& m, const MetaDataset& d, ParamVector p);
double deviance(const ModelSpec& m, const MetaDataset& d, ParamVector p);

// w * log_likelihood + log_latent + log_prior, on the natural scale.
double log_posterior(const ModelSpec& m, const MetaDataset& d, ParamVector p, double w = 1.0);

// theta_i ~ N(mu, tau^2), y_i ~ N(theta_i, sigma^2), all sigma_i = sigma.
MetaDataset simulate_nnhm(double mu, double tau, double sigma, std::size_t n, RngStream& rng);

// Prior presets: eight schools, RTI, and the simulation models A, B1-B3, C1-C3.
ModelSpec eight_schools_model(ModelFamily f, double tau_scale = 5.0);
ModelSpec rti_nnhm_model();
ModelSpec rti_logit_model();
ModelSpec simulation_model(std::string_view variant);
const std::vector<std::string>& simulation_variants();

}  // namespace edmeta
