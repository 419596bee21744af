#include "edmeta/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <istream>

#include "edmeta/csv.hpp"
#include "edmeta/error.hpp"

namespace edmeta {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void bad(const std::string& where, std::string_view key, std::string_view value, std::string_view what) {
  throw IoError(where + ": invalid value '" + std::string(value) + "' for " + std::string(key) + " (" +
                std::string(what) + ")");
}

double real(const std::string& where, std::string_view key, std::string_view value) {
  double v;
  if (!csv::parse(trim(value), v) || !std::isfinite(v)) bad(where, key, value, "expected a number");
  return v;
}

std::size_t count(const std::string& where, std::string_view key, std::string_view value) {
  long v;
  if (!csv::parse(trim(value), v) || v < 0) bad(where, key, value, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t u64(const std::string& where, std::string_view key, std::string_view value) {
  auto t = trim(value);
  std::uint64_t v;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) bad(where, key, value, "expected an unsigned integer");
  return v;
}

bool boolean(const std::string& where, std::string_view key, std::string_view value) {
  auto v = lower(trim(value));
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  bad(where, key, value, "expected true or false");
}

std::vector<std::string> list(std::string_view value) {
  std::vector<std::string> out;
  for (auto& f : csv::split_line(value))
    if (!f.empty()) out.push_back(f);
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"model", [](RunConfig& c, std::string_view v, const std::string&) { c.model = lower(trim(v)); }},
      {"data", [](RunConfig& c, std::string_view v, const std::string&) { c.data = std::string(trim(v)); }},
      {"chains", [](RunConfig& c, std::string_view v, const std::string& w) { c.mcmc.chains = count(w, "chains", v); }},
      {"iterations",
       [](RunConfig& c, std::string_view v, const std::string& w) { c.mcmc.iterations = count(w, "iterations", v); }},
      {"burn_in", [](RunConfig& c, std::string_view v, const std::string& w) { c.mcmc.burn_in = count(w, "burn_in", v); }},
      {"thin", [](RunConfig& c, std::string_view v, const std::string& w) { c.mcmc.thin = count(w, "thin", v); }},
      {"seed", [](RunConfig& c, std::string_view v, const std::string& w) { c.mcmc.seed = u64(w, "seed", v); }},
      {"adapt_window",
       [](RunConfig& c, std::string_view v, const std::string& w) { c.mcmc.adapt_window = count(w, "adapt_window", v); }},
      {"threads", [](RunConfig& c, std::string_view v, const std::string& w) { c.mcmc.threads = count(w, "threads", v); }},
      {"delta", [](RunConfig& c, std::string_view v, const std::string& w) { c.delta = real(w, "delta", v); }},
      {"method",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         try {
           c.method = parse_method(trim(v));
         } catch (const Error&) {
           bad(w, "method", v, "expected reweight, refit or both");
         }
       }},
      {"escalate", [](RunConfig& c, std::string_view v, const std::string& w) { c.escalate = boolean(w, "escalate", v); }},
      {"rhat_threshold",
       [](RunConfig& c, std::string_view v, const std::string& w) { c.rhat_threshold = real(w, "rhat_threshold", v); }},
      {"out", [](RunConfig& c, std::string_view v, const std::string&) { c.out = std::string(trim(v)); }},
      {"save_draws",
       [](RunConfig& c, std::string_view v, const std::string& w) { c.save_draws = boolean(w, "save_draws", v); }},
      {"rlmc_targets",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         c.rlmc_targets.clear();
         for (auto& t : list(v)) c.rlmc_targets.push_back(real(w, "rlmc_targets", t));
         if (c.rlmc_targets.empty()) bad(w, "rlmc_targets", v, "expected a comma-separated list");
       }},
      {"rlmc_family",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         auto s = lower(trim(v));
         if (s == "hn" || s == "halfnormal" || s == "half-normal") c.rlmc_family = Family::HalfNormal;
         else if (s == "hc" || s == "halfcauchy" || s == "half-cauchy") c.rlmc_family = Family::HalfCauchy;
         else bad(w, "rlmc_family", v, "expected HN or HC");
       }},
      {"rlmc_functional",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         auto s = lower(trim(v));
         if (s == "reference") c.rlmc_functional = RlmcFunctional::GeometricReference;
         else if (s == "average") c.rlmc_functional = RlmcFunctional::StudyAverage;
         else bad(w, "rlmc_functional", v, "expected reference or average");
       }},
      {"parametrizations",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         c.parametrizations.clear();
         for (auto& p : list(v)) {
           auto f = lower(p);
           if (f != "nnhm-centered" && f != "nnhm-noncentered")
             bad(w, "parametrizations", v, "expected nnhm-centered and/or nnhm-noncentered");
           c.parametrizations.push_back(f);
         }
         if (c.parametrizations.empty()) bad(w, "parametrizations", v, "expected at least one");
       }},
      {"sim_mu", [](RunConfig& c, std::string_view v, const std::string& w) { c.sim_mu = real(w, "sim_mu", v); }},
      {"sim_tau", [](RunConfig& c, std::string_view v, const std::string& w) { c.sim_tau = real(w, "sim_tau", v); }},
      {"sim_sigma", [](RunConfig& c, std::string_view v, const std::string& w) { c.sim_sigma = real(w, "sim_sigma", v); }},
      {"sim_n", [](RunConfig& c, std::string_view v, const std::string& w) { c.sim_n = count(w, "sim_n", v); }},
      {"replicates",
       [](RunConfig& c, std::string_view v, const std::string& w) { c.replicates = count(w, "replicates", v); }},
      {"sim_models",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         c.sim_models.clear();
         const auto& known = simulation_variants();
         for (auto& m : list(v)) {
           std::string up(m);
           for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
           if (std::find(known.begin(), known.end(), up) == known.end())
             bad(w, "sim_models", v, "unknown simulation model " + up);
           c.sim_models.push_back(up);
         }
         if (c.sim_models.empty()) bad(w, "sim_models", v, "expected at least one");
       }},
  };
  return table;
}

}  // namespace

std::string_view to_string(MethodChoice m) {
  switch (m) {
    case MethodChoice::Reweight: return "reweight";
    case MethodChoice::Refit: return "refit";
    case MethodChoice::Both: return "both";
  }
  return "reweight";
}

MethodChoice parse_method(std::string_view s) {
  auto v = lower(s);
  if (v == "reweight") return MethodChoice::Reweight;
  if (v == "refit") return MethodChoice::Refit;
  if (v == "both") return MethodChoice::Both;
  throw ParameterError("unknown method '" + std::string(s) + "' (expected reweight, refit or both)");
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, const std::string& where) {
  auto k = lower(trim(key));
  std::replace(k.begin(), k.end(), '-', '_');
  for (const auto& [name, set] : setters())
    if (name == k) return set(cfg, value, where);
  throw IoError(where + ": unknown key '" + std::string(trim(key)) + "'");
}

void apply_prior(RunConfig& cfg, std::string_view role, std::string_view value, const std::string& where) {
  Role r;
  try {
    r = parse_role(lower(trim(role)));
  } catch (const Error&) {
    throw IoError(where + ": unknown prior role '" + std::string(trim(role)) + "'");
  }
  try {
    cfg.priors[r] = parse_dist(trim(value));
  } catch (const Error& e) {
    throw IoError(where + ": " + e.what());
  }
}

void parse_config(std::istream& in, const std::string& name, RunConfig& cfg) {
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = name + ":" + std::to_string(lineno);
    std::string_view s = trim(line);
    if (auto hash = s.find_first_of("#;"); hash != std::string_view::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw IoError(where + ": malformed section header");
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (section != "priors") throw IoError(where + ": unknown section '" + section + "'");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string_view::npos) throw IoError(where + ": expected key = value");
    auto key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (section == "priors") apply_prior(cfg, key, value, where);
    else apply_setting(cfg, key, value, where);
  }
}

void load_config(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open config file");
  parse_config(in, path.string(), cfg);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : setters()) k.push_back(s.first);
    return k;
  }();
  return keys;
}

ModelSpec resolve_model(const RunConfig& cfg) {
  auto name = lower(cfg.model);
  ModelSpec m;
  const auto& variants = simulation_variants();
  std::string up = name.size() > 4 ? name.substr(4) : "";
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (name.rfind("sim-", 0) == 0 && std::find(variants.begin(), variants.end(), up) != variants.end()) {
    m = simulation_model(up);
  } else {
    ModelFamily f = parse_model_family(name);
    switch (f) {
      case ModelFamily::NNHMCentered:
      case ModelFamily::NNHMNonCentered: m = eight_schools_model(f); break;
      case ModelFamily::LogitRE: m = rti_logit_model(); break;
      case ModelFamily::SimA: m = simulation_model("A"); break;
      case ModelFamily::SimB: m = simulation_model("B1"); break;
      case ModelFamily::SimC: m = simulation_model("C1"); break;
    }
  }
  for (const auto& [role, dist] : cfg.priors) {
    auto req = required_roles(m.family);
    if (std::find(req.begin(), req.end(), role) == req.end())
      throw ParameterError("prior for " + std::string(to_string(role)) + " is not used by model " +
                           std::string(to_string(m.family)));
    m.priors[role] = dist;
  }
  validate(m);
  return m;
}

}  // namespace edmeta
