#include "edmeta/models.hpp"

#include <algorithm>
#include <cmath>

#include "edmeta/error.hpp"

namespace edmeta {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double normal_lpdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return -kLogSqrt2Pi - std::log(sd) - 0.5 * z * z;
}

// log p and log(1-p) for p = logistic(lp), stable in both tails.
inline double log_inv_logit(double lp) {
  return lp >= 0 ? -std::log1p(std::exp(-lp)) : lp - std::log1p(std::exp(lp));
}

std::size_t param_count(const LayoutIndex& ix) {
  std::size_t n = ix.n_effects;
  for (int at : {ix.mu, ix.tau, ix.sigma, ix.gamma, ix.alpha, ix.beta}) n += at >= 0;
  return n;
}

void check_dims(const ModelSpec& m, const MetaDataset& d, ParamVector p) {
  std::size_t want = param_count(layout_index(m, d));
  if (p.size() != want)
    throw DimensionError("parameter vector has " + std::to_string(p.size()) +
                         " entries, layout needs " + std::to_string(want));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

const DistSpec& ModelSpec::prior(Role r) const {
  auto it = priors.find(r);
  if (it == priors.end())
    throw ModelError("model " + std::string(edmeta::to_string(family)) + " has no prior for " +
                     std::string(edmeta::to_string(r)));
  return it->second;
}

std::optional<std::size_t> ParamLayout::find(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name || analysis_name(i) == name) return i;
  return std::nullopt;
}

std::size_t ParamLayout::index(std::string_view name) const {
  auto i = find(name);
  if (!i) throw DimensionError("no parameter named '" + std::string(name) + "'");
  return *i;
}

std::string ParamLayout::analysis_name(std::size_t i) const {
  if (scale_tags.at(i) == ScaleTag::LogPrecision) return "log(" + names[i] + "^-2)";
  return names[i];
}

std::string_view to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::NNHMCentered: return "nnhm-centered";
    case ModelFamily::NNHMNonCentered: return "nnhm-noncentered";
    case ModelFamily::LogitRE: return "logit";
    case ModelFamily::SimA: return "sim-a";
    case ModelFamily::SimB: return "sim-b";
    case ModelFamily::SimC: return "sim-c";
  }
  return "?";
}

ModelFamily parse_model_family(std::string_view name) {
  std::string s = lower(name);
  if (s == "nnhm-centered" || s == "nnhm" || s == "centered") return ModelFamily::NNHMCentered;
  if (s == "nnhm-noncentered" || s == "noncentered") return ModelFamily::NNHMNonCentered;
  if (s == "logit" || s == "logit-re") return ModelFamily::LogitRE;
  if (s == "sim-a") return ModelFamily::SimA;
  if (s == "sim-b") return ModelFamily::SimB;
  if (s == "sim-c") return ModelFamily::SimC;
  throw ModelError("unknown model family '" + std::string(name) + "'");
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Mu: return "mu";
    case Role::Tau: return "tau";
    case Role::Sigma: return "sigma";
    case Role::Gamma: return "gamma";
    case Role::Alpha: return "alpha";
    case Role::Beta: return "beta";
  }
  return "?";
}

Role parse_role(std::string_view name) {
  std::string s = lower(name);
  for (Role r : {Role::Mu, Role::Tau, Role::Sigma, Role::Gamma, Role::Alpha, Role::Beta})
    if (s == to_string(r)) return r;
  throw ModelError("unknown parameter role '" + std::string(name) + "'");
}

std::vector<Role> required_roles(ModelFamily f) {
  switch (f) {
    case ModelFamily::NNHMCentered:
    case ModelFamily::NNHMNonCentered:
    case ModelFamily::SimB:
      return {Role::Mu, Role::Tau};
    case ModelFamily::LogitRE: return {Role::Alpha, Role::Beta, Role::Tau};
    case ModelFamily::SimA: return {Role::Mu, Role::Gamma};
    case ModelFamily::SimC: return {Role::Mu, Role::Tau, Role::Sigma};
  }
  return {};
}

DataKind data_kind_for(ModelFamily f) {
  return f == ModelFamily::LogitRE ? DataKind::BinomialArms : DataKind::NormalEffects;
}

void validate(const ModelSpec& m) {
  for (Role r : required_roles(m.family)) {
    const DistSpec& d = m.prior(r);
    try {
      validate(d);
    } catch (const ParameterError& e) {
      throw ModelError(std::string("prior for ") + std::string(to_string(r)) + ": " + e.what());
    }
    bool scale = r == Role::Tau || r == Role::Sigma || r == Role::Gamma;
    if (scale && !positive_support(d))
      throw ModelError(std::string("prior for ") + std::string(to_string(r)) +
                       " must have support in (0, inf), got " + to_string(d));
    // Location blocks are sampled by conjugate Gibbs steps.
    if (!scale && d.family != Family::Normal)
      throw ModelError(std::string("prior for ") + std::string(to_string(r)) +
                       " must be Normal, got " + to_string(d));
  }
}

LayoutIndex layout_index(const ModelSpec& m, const MetaDataset& d) {
  if (d.kind != data_kind_for(m.family))
    throw ModelError("model " + std::string(to_string(m.family)) +
                     (d.kind == DataKind::NormalEffects ? " needs binomial arm counts"
                                                        : " needs normal effects data"));
  LayoutIndex ix;
  switch (m.family) {
    case ModelFamily::NNHMCentered:
    case ModelFamily::NNHMNonCentered:
    case ModelFamily::SimB:
      ix.mu = 0, ix.tau = 1, ix.effects = 2, ix.n_effects = d.k();
      break;
    case ModelFamily::LogitRE:
      ix.alpha = 0, ix.beta = 1, ix.tau = 2, ix.effects = 3, ix.n_effects = 2 * d.k();
      break;
    case ModelFamily::SimA:
      ix.mu = 0, ix.gamma = 1;
      break;
    case ModelFamily::SimC:
      ix.mu = 0, ix.sigma = 1, ix.tau = 2, ix.effects = 3, ix.n_effects = d.k();
      break;
  }
  return ix;
}

ParamLayout layout(const ModelSpec& m, const MetaDataset& d) {
  LayoutIndex ix = layout_index(m, d);
  ParamLayout out;
  auto add = [&](std::string name, ScaleTag tag) {
    out.names.push_back(std::move(name));
    out.scale_tags.push_back(tag);
  };
  switch (m.family) {
    case ModelFamily::NNHMCentered:
    case ModelFamily::SimB:
      add("mu", ScaleTag::Identity);
      add("tau", ScaleTag::LogPrecision);
      break;
    case ModelFamily::NNHMNonCentered:
      add("mu", ScaleTag::Identity);
      add("tau", ScaleTag::LogPrecision);
      break;
    case ModelFamily::LogitRE:
      add("alpha", ScaleTag::Identity);
      add("beta", ScaleTag::Identity);
      add("tau", ScaleTag::LogPrecision);
      break;
    case ModelFamily::SimA:
      add("mu", ScaleTag::Identity);
      add("gamma", ScaleTag::LogPrecision);
      break;
    case ModelFamily::SimC:
      add("mu", ScaleTag::Identity);
      add("sigma", ScaleTag::LogPrecision);
      add("tau", ScaleTag::LogPrecision);
      break;
  }
  const char* effect = m.family == ModelFamily::NNHMNonCentered ? "theta_tilde"
                       : m.family == ModelFamily::LogitRE       ? "eta"
                                                                : "theta";
  for (std::size_t j = 0; j < ix.n_effects; ++j)
    add(std::string(effect) + "[" + std::to_string(j + 1) + "]", ScaleTag::Identity);
  return out;
}

double log_likelihood(const ModelSpec& m, const MetaDataset& d, ParamVector p) {
  check_dims(m, d, p);
  LayoutIndex ix = layout_index(m, d);
  double ll = 0.0;
  switch (m.family) {
    case ModelFamily::NNHMCentered:
    case ModelFamily::SimB:
      for (std::size_t j = 0; j < d.k(); ++j) ll += normal_lpdf(d.y[j], p[ix.effects + j], d.sigma[j]);
      break;
    case ModelFamily::NNHMNonCentered: {
      double mu = p[ix.mu], tau = p[ix.tau];
      for (std::size_t j = 0; j < d.k(); ++j)
        ll += normal_lpdf(d.y[j], mu + tau * p[ix.effects + j], d.sigma[j]);
      break;
    }
    case ModelFamily::SimA:
      for (std::size_t j = 0; j < d.k(); ++j) ll += normal_lpdf(d.y[j], p[ix.mu], p[ix.gamma]);
      break;
    case ModelFamily::SimC:
      for (std::size_t j = 0; j < d.k(); ++j)
        ll += normal_lpdf(d.y[j], p[ix.effects + j], p[ix.sigma]);
      break;
    case ModelFamily::LogitRE: {
      std::size_t k = d.k();
      for (std::size_t r = 0; r < 2 * k; ++r) {
        bool treat = r < k;
        std::size_t j = treat ? r : r - k;
        double z = treat ? d.events_treat[j] : d.events_control[j];
        double n = treat ? d.total_treat[j] : d.total_control[j];
        double lp = p[ix.alpha] + (treat ? p[ix.beta] : 0.0) + p[ix.effects + r];
        ll += std::lgamma(n + 1) - std::lgamma(z + 1) - std::lgamma(n - z + 1) +
              z * log_inv_logit(lp) + (n - z) * log_inv_logit(-lp);
      }
      break;
    }
  }
  return ll;
}

double log_latent(const ModelSpec& m, const MetaDataset& d, ParamVector p) {
  check_dims(m, d, p);
  LayoutIndex ix = layout_index(m, d);
  double out = 0.0;
  switch (m.family) {
    case ModelFamily::NNHMCentered:
    case ModelFamily::SimB:
    case ModelFamily::SimC:
      for (std::size_t j = 0; j < ix.n_effects; ++j)
        out += normal_lpdf(p[ix.effects + j], p[ix.mu], p[ix.tau]);
      break;
    case ModelFamily::NNHMNonCentered:
      for (std::size_t j = 0; j < ix.n_effects; ++j) out += normal_lpdf(p[ix.effects + j], 0.0, 1.0);
      break;
    case ModelFamily::LogitRE:
      for (std::size_t j = 0; j < ix.n_effects; ++j)
        out += normal_lpdf(p[ix.effects + j], 0.0, p[ix.tau]);
      break;
    case ModelFamily::SimA:
      break;
  }
  return out;
}

double log_prior(const ModelSpec& m, const MetaDataset& d, ParamVector p) {
  check_dims(m, d, p);
  LayoutIndex ix = layout_index(m, d);
  double out = 0.0;
  auto add = [&](Role r, int at) {
    if (at >= 0) out += log_pdf(m.prior(r), p[at]);
  };
  add(Role::Mu, ix.mu);
  add(Role::Tau, ix.tau);
  add(Role::Sigma, ix.sigma);
  add(Role::Gamma, ix.gamma);
  add(Role::Alpha, ix.alpha);
  add(Role::Beta, ix.beta);
  return out;
}

double deviance(const ModelSpec& m, const MetaDataset& d, ParamVector p) {
  return -2.0 * log_likelihood(m, d, p);
}

double log_posterior(const ModelSpec& m, const MetaDataset& d, ParamVector p, double w) {
  return w * log_likelihood(m, d, p) + log_latent(m, d, p) + log_prior(m, d, p);
}

MetaDataset simulate_nnhm(double mu, double tau, double sigma, std::size_t n, RngStream& rng) {
  if (!(tau >= 0.0) || !(sigma > 0.0) || n < 1 || !std::isfinite(mu))
    throw ParameterError("simulate_nnhm: need tau >= 0, sigma > 0, n >= 1");
  std::vector<double> y(n), s(n, sigma);
  for (std::size_t i = 0; i < n; ++i) {
    double theta = mu + tau * rng.normal();
    y[i] = theta + sigma * rng.normal();
  }
  return MetaDataset::normal_effects(std::move(y), std::move(s));
}

ModelSpec eight_schools_model(ModelFamily f, double tau_scale) {
  return {f, {{Role::Mu, DistSpec::normal(0, 16)}, {Role::Tau, DistSpec::half_normal(tau_scale)}}};
}

ModelSpec rti_nnhm_model() {
  return {ModelFamily::NNHMCentered,
          {{Role::Mu, DistSpec::normal(0, 16)}, {Role::Tau, DistSpec::half_cauchy(1)}}};
}

ModelSpec rti_logit_model() {
  return {ModelFamily::LogitRE,
          {{Role::Alpha, DistSpec::normal(0, 16)},
           {Role::Beta, DistSpec::normal(0, 16)},
           {Role::Tau, DistSpec::half_cauchy(1)}}};
}

const std::vector<std::string>& simulation_variants() {
  static const std::vector<std::string> v{"A", "B1", "B2", "B3", "C1", "C2", "C3"};
  return v;
}

ModelSpec simulation_model(std::string_view variant) {
  std::string v(variant);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::toupper(c); });
  const DistSpec mu = DistSpec::normal(0, 1e3);
  const DistSpec flat_log = DistSpec::exp_normal(0, 1e3);
  const DistSpec vague_ig = DistSpec::sqrt_inv_gamma(0.001, 0.001);
  if (v == "A") return {ModelFamily::SimA, {{Role::Mu, mu}, {Role::Gamma, flat_log}}};
  if (v == "B1") return {ModelFamily::SimB, {{Role::Mu, mu}, {Role::Tau, flat_log}}};
  if (v == "B2") return {ModelFamily::SimB, {{Role::Mu, mu}, {Role::Tau, vague_ig}}};
  if (v == "B3")
    return {ModelFamily::SimB, {{Role::Mu, mu}, {Role::Tau, DistSpec::sqrt_inv_gamma(4, 1)}}};
  if (v == "C1")
    return {ModelFamily::SimC, {{Role::Mu, mu}, {Role::Tau, flat_log}, {Role::Sigma, flat_log}}};
  if (v == "C2")
    return {ModelFamily::SimC, {{Role::Mu, mu}, {Role::Tau, vague_ig}, {Role::Sigma, vague_ig}}};
  if (v == "C3") {
    DistSpec tight = DistSpec::sqrt_inv_gamma(150, 6);
    return {ModelFamily::SimC, {{Role::Mu, mu}, {Role::Tau, tight}, {Role::Sigma, tight}}};
  }
  throw ModelError("unknown simulation model '" + std::string(variant) + "'");
}

}  // namespace edmeta
