#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "edmeta/distributions.hpp"
#include "edmeta/models.hpp"
#include "edmeta/rlmc.hpp"
#include "edmeta/sampler.hpp"

namespace edmeta {

enum class MethodChoice { Reweight, Refit, Both };
std::string_view to_string(MethodChoice m);
MethodChoice parse_method(std::string_view s);

struct RunConfig {
  std::string model = "nnhm-centered";
  std::map<Role, DistSpec> priors;  // overrides of the model's default priors
  std::string data = "builtin:eight-schools";
  McmcConfig mcmc;
  double delta = 0.01;
  MethodChoice method = MethodChoice::Reweight;
  bool escalate = true;  // refit when importance weights degenerate
  double rhat_threshold = 1.05;
  std::filesystem::path out = ".";
  bool save_draws = false;

  std::vector<double> rlmc_targets{0.05, 0.25, 0.5, 0.75, 0.95};
  Family rlmc_family = Family::HalfNormal;
  RlmcFunctional rlmc_functional = RlmcFunctional::GeometricReference;
  std::vector<std::string> parametrizations{"nnhm-centered", "nnhm-noncentered"};

  double sim_mu = 2.5, sim_tau = 0.5, sim_sigma = 0.2;
  std::size_t sim_n = 50;
  std::size_t replicates = 1;
  std::vector<std::string> sim_models{"A", "B1", "B2", "B3", "C1", "C2", "C3"};
};

// Sets one key. `where` prefixes error messages (e.g. "run.ini:12").
// Unknown keys and malformed values throw IoError.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, const std::string& where);
void apply_prior(RunConfig& cfg, std::string_view role, std::string_view value, const std::string& where);

// `key = value` lines, '#' or ';' comments, and a [priors] section of
// `role = Family(params)` lines.
void parse_config(std::istream& in, const std::string& name, RunConfig& cfg);
void load_config(const std::filesystem::path& path, RunConfig& cfg);

// Names accepted by apply_setting, for help text.
const std::vector<std::string>& config_keys();

// The model named by cfg.model with its defaults, then cfg.priors.
// nnhm-* use the eight-schools priors, logit the RTI ones, and sim-a /
// sim-b / sim-c the A / B1 / C1 simulation priors; simulation variant names
// (sim-b3, ...) select that variant's priors.
ModelSpec resolve_model(const RunConfig& cfg);

}  // namespace edmeta
