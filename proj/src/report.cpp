#include "edmeta/report.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "edmeta/csv.hpp"
#include "edmeta/error.hpp"
#include "edmeta/reweight.hpp"

namespace edmeta {
namespace {

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double num_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return NAN;
  return j.at(key).get<double>();
}

// Keeps free text out of the field separator.
std::string field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// Reads a CSV with a fixed header, handing each row's fields to `row`.
template <class F>
void read_csv(std::istream& in, const std::string& name, const std::vector<std::string>& header, F&& row) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw IoError(name + ": empty file");
  ++lineno;
  if (csv::split_line(line) != header) throw IoError(name + ":1: unexpected header");
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = csv::split_line(line);
    if (f.size() != header.size())
      throw IoError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                    " fields, found " + std::to_string(f.size()));
    auto real = [&](std::size_t i) {
      double v;
      if (!csv::parse(f[i], v))
        throw IoError(name + ":" + std::to_string(lineno) + ": bad number '" + f[i] + "' in column " + header[i]);
      return v;
    };
    row(f, real, lineno);
  }
}

void write_header(std::ostream& out, const std::vector<std::string>& h) {
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
}

const std::vector<std::string> kSummaryHeader{"param", "mean", "sd",  "q0.025", "q0.5", "q0.975",
                                              "TED",   "EDL",  "EDS", "pEDL",   "pEDS", "ESS"};
const std::vector<std::string> kTransitionHeader{"rlmc_target", "scale", "parametrization", "param",
                                                 "ted",         "pedl",  "peds",            "status"};
const std::vector<std::string> kSimulationHeader{
    "model",     "replicate",  "method",    "TED_mu",     "TED_sigma", "TED_tau",    "TED_gamma",
    "pEDL_mu",   "pEDS_mu",    "pEDL_sigma", "pEDS_sigma", "pEDL_tau", "pEDS_tau",   "pEDL_gamma",
    "pEDS_gamma", "ESS_mu",    "ESS_sigma", "ESS_tau",    "ESS_gamma", "max_rhat",   "min_ess",
    "flags",     "status"};

}  // namespace

bool SummaryRow::operator==(const SummaryRow& o) const {
  return param == o.param && same(mean, o.mean) && same(sd, o.sd) && same(q025, o.q025) && same(q50, o.q50) &&
         same(q975, o.q975) && same(ted, o.ted) && same(edl, o.edl) && same(eds, o.eds) && same(pedl, o.pedl) &&
         same(peds, o.peds) && same(ess, o.ess);
}

std::vector<SummaryRow> summary_rows(const DrawMatrix& draws, const ChainDiagnostics& diag,
                                     const DeterminacyReport* det) {
  std::vector<SummaryRow> rows;
  for (std::size_t p = 0; p < draws.layout.size(); ++p) {
    SummaryRow r;
    r.param = draws.layout.analysis_name(p);
    auto x = analysis_draws(draws, p);
    double n = static_cast<double>(x.size()), s = 0.0, ss = 0.0;
    for (double v : x) s += v;
    r.mean = s / n;
    for (double v : x) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / n);
    r.q025 = quantile(x, 0.025);
    r.q50 = quantile(x, 0.5);
    r.q975 = quantile(x, 0.975);
    r.ess = diag.params.size() > p && diag.params[p].error.empty() ? diag.params[p].ess : NAN;
    if (det) {
      const auto& d = det->params.at(p);
      r.ted = d.ted;
      r.edl = d.edl;
      r.eds = d.eds;
      r.pedl = d.pedl.value_or(NAN);
      r.peds = d.peds.value_or(NAN);
      r.noise_flag = d.noise_flag;
      r.ted_full_bc = d.ted_full_bc;
    } else {
      r.ted = r.edl = r.eds = r.pedl = r.peds = r.ted_full_bc = NAN;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  write_header(out, kSummaryHeader);
  for (const auto& r : rows) {
    out << field(r.param);
    for (double v : {r.mean, r.sd, r.q025, r.q50, r.q975, r.ted, r.edl, r.eds, r.pedl, r.peds, r.ess})
      out << ',' << csv::format(v);
    out << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in, const std::string& name) {
  std::vector<SummaryRow> rows;
  read_csv(in, name, kSummaryHeader, [&](const auto& f, auto real, std::size_t) {
    SummaryRow r;
    r.param = f[0];
    r.mean = real(1), r.sd = real(2), r.q025 = real(3), r.q50 = real(4), r.q975 = real(5);
    r.ted = real(6), r.edl = real(7), r.eds = real(8), r.pedl = real(9), r.peds = real(10), r.ess = real(11);
    rows.push_back(std::move(r));
  });
  return rows;
}

Json to_json(const std::vector<SummaryRow>& rows) {
  Json out = Json::object();
  for (const auto& r : rows) {
    out[r.param] = Json{{"mean", num(r.mean)}, {"sd", num(r.sd)},     {"q025", num(r.q025)},  {"q50", num(r.q50)},
                        {"q975", num(r.q975)}, {"ted", num(r.ted)},   {"edl", num(r.edl)},    {"eds", num(r.eds)},
                        {"pedl", num(r.pedl)}, {"peds", num(r.peds)}, {"ess", num(r.ess)},    {"noise_flag", r.noise_flag},
                        {"ted_full_bc", num(r.ted_full_bc)}};
  }
  return out;
}

std::vector<SummaryRow> rows_from_json(const Json& parameters) {
  if (!parameters.is_object()) throw IoError("report: \"parameters\" must be an object");
  std::vector<SummaryRow> rows;
  for (auto it = parameters.begin(); it != parameters.end(); ++it) {
    const Json& j = it.value();
    SummaryRow r;
    r.param = it.key();
    r.mean = num_from(j, "mean"), r.sd = num_from(j, "sd");
    r.q025 = num_from(j, "q025"), r.q50 = num_from(j, "q50"), r.q975 = num_from(j, "q975");
    r.ted = num_from(j, "ted"), r.edl = num_from(j, "edl"), r.eds = num_from(j, "eds");
    r.pedl = num_from(j, "pedl"), r.peds = num_from(j, "peds"), r.ess = num_from(j, "ess");
    r.noise_flag = j.value("noise_flag", false);
    r.ted_full_bc = num_from(j, "ted_full_bc");
    rows.push_back(std::move(r));
  }
  return rows;
}

Json to_json(const ChainDiagnostics& diag) {
  Json params = Json::object();
  for (const auto& p : diag.params) {
    Json j;
    j["ess"] = num(p.ess);
    j["split_rhat"] = num(p.split_rhat);
    j["mcse_mean"] = num(p.mcse_mean);
    j["mcse_sd"] = num(p.mcse_sd);
    j["rank_chi_square"] = num(p.ranks.chi_square);
    j["rank_dof"] = num(p.ranks.dof);
    j["rank_p_value"] = num(p.ranks.p_value);
    j["rank_counts"] = p.ranks.counts;
    if (!p.error.empty()) j["error"] = p.error;
    params[p.name] = std::move(j);
  }
  Json acc = Json::object();
  for (std::size_t i = 0; i < diag.mh_names.size(); ++i) {
    Json per_chain = Json::array();
    for (const auto& chain : diag.acceptance) per_chain.push_back(num(chain.at(i)));
    acc[diag.mh_names[i]] = std::move(per_chain);
  }
  return Json{{"max_rhat", num(diag.max_rhat())},
              {"min_ess", num(diag.min_ess())},
              {"min_rank_p", num(diag.min_rank_p())},
              {"acceptance", std::move(acc)},
              {"parameters", std::move(params)}};
}

ChainDiagnostics diagnostics_from_json(const Json& j) {
  ChainDiagnostics d;
  try {
    for (auto it = j.at("parameters").begin(); it != j.at("parameters").end(); ++it) {
      const Json& p = it.value();
      ParamDiagnostics pd;
      pd.name = it.key();
      pd.ess = num_from(p, "ess");
      pd.split_rhat = num_from(p, "split_rhat");
      pd.mcse_mean = num_from(p, "mcse_mean");
      pd.mcse_sd = num_from(p, "mcse_sd");
      pd.ranks.chi_square = num_from(p, "rank_chi_square");
      pd.ranks.dof = num_from(p, "rank_dof");
      pd.ranks.p_value = num_from(p, "rank_p_value");
      pd.ranks.counts = p.at("rank_counts").get<std::vector<std::vector<std::size_t>>>();
      pd.error = p.value("error", std::string());
      d.params.push_back(std::move(pd));
    }
    const Json& acc = j.at("acceptance");
    std::size_t chains = acc.empty() ? 0 : acc.begin().value().size();
    d.acceptance.assign(chains, {});
    for (auto it = acc.begin(); it != acc.end(); ++it) {
      d.mh_names.push_back(it.key());
      for (std::size_t c = 0; c < chains; ++c) {
        const Json& v = it.value().at(c);
        d.acceptance[c].push_back(v.is_null() ? NAN : v.get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("diagnostics: ") + e.what());
  }
  return d;
}

Json to_json(const std::vector<DeltaSweepRow>& sweep, const std::vector<double>& deltas) {
  Json rows = Json::object();
  for (const auto& r : sweep) {
    Json ted = Json::array();
    for (double t : r.ted) ted.push_back(num(t));
    rows[r.name] = Json{{"ted", std::move(ted)}, {"richardson", r.richardson ? num(*r.richardson) : Json(nullptr)}};
  }
  return Json{{"deltas", deltas}, {"parameters", std::move(rows)}};
}

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

Json read_json(std::istream& in, const std::string& name) {
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(name + ": " + e.what());
  }
}

bool TransitionRow::operator==(const TransitionRow& o) const {
  return same(rlmc_target, o.rlmc_target) && same(scale, o.scale) && parametrization == o.parametrization &&
         param == o.param && same(ted, o.ted) && same(pedl, o.pedl) && same(peds, o.peds) && status == o.status;
}

void write_transition_csv(std::ostream& out, const std::vector<TransitionRow>& rows) {
  write_header(out, kTransitionHeader);
  for (const auto& r : rows)
    out << csv::format(r.rlmc_target) << ',' << csv::format(r.scale) << ',' << field(r.parametrization) << ','
        << field(r.param) << ',' << csv::format(r.ted) << ',' << csv::format(r.pedl) << ',' << csv::format(r.peds)
        << ',' << field(r.status) << '\n';
}

std::vector<TransitionRow> read_transition_csv(std::istream& in, const std::string& name) {
  std::vector<TransitionRow> rows;
  read_csv(in, name, kTransitionHeader, [&](const auto& f, auto real, std::size_t) {
    rows.push_back({real(0), real(1), f[2], f[3], real(4), real(5), real(6), f[7]});
  });
  return rows;
}

bool SimulationRow::operator==(const SimulationRow& o) const {
  auto nums = [](const SimulationRow& r) {
    return std::vector<double>{r.ted_mu,   r.ted_sigma,  r.ted_tau,    r.ted_gamma,  r.pedl_mu, r.peds_mu,
                               r.pedl_sigma, r.peds_sigma, r.pedl_tau,   r.peds_tau,   r.pedl_gamma, r.peds_gamma,
                               r.ess_mu,   r.ess_sigma,  r.ess_tau,    r.ess_gamma,  r.max_rhat, r.min_ess};
  };
  auto a = nums(*this), b = nums(o);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return model == o.model && replicate == o.replicate && method == o.method && flags == o.flags &&
         status == o.status;
}

void write_simulation_csv(std::ostream& out, const std::vector<SimulationRow>& rows) {
  write_header(out, kSimulationHeader);
  for (const auto& r : rows) {
    out << field(r.model) << ',' << r.replicate << ',' << field(r.method);
    for (double v : {r.ted_mu, r.ted_sigma, r.ted_tau, r.ted_gamma, r.pedl_mu, r.peds_mu, r.pedl_sigma,
                     r.peds_sigma, r.pedl_tau, r.peds_tau, r.pedl_gamma, r.peds_gamma, r.ess_mu, r.ess_sigma,
                     r.ess_tau, r.ess_gamma, r.max_rhat, r.min_ess})
      out << ',' << csv::format(v);
    out << ',' << field(r.flags) << ',' << field(r.status) << '\n';
  }
}

std::vector<SimulationRow> read_simulation_csv(std::istream& in, const std::string& name) {
  std::vector<SimulationRow> rows;
  read_csv(in, name, kSimulationHeader, [&](const auto& f, auto real, std::size_t lineno) {
    SimulationRow r;
    r.model = f[0];
    long rep;
    if (!csv::parse(f[1], rep) || rep < 0)
      throw IoError(name + ":" + std::to_string(lineno) + ": bad replicate '" + f[1] + "'");
    r.replicate = static_cast<std::size_t>(rep);
    r.method = f[2];
    double* slots[] = {&r.ted_mu,   &r.ted_sigma,  &r.ted_tau,    &r.ted_gamma,  &r.pedl_mu,    &r.peds_mu,
                       &r.pedl_sigma, &r.peds_sigma, &r.pedl_tau,  &r.peds_tau,   &r.pedl_gamma, &r.peds_gamma,
                       &r.ess_mu,   &r.ess_sigma,  &r.ess_tau,    &r.ess_gamma,  &r.max_rhat,   &r.min_ess};
    for (std::size_t i = 0; i < std::size(slots); ++i) *slots[i] = real(3 + i);
    r.flags = f[21];
    r.status = f[22];
    rows.push_back(std::move(r));
  });
  return rows;
}

void write_ess_csv(std::ostream& out, const std::vector<SimulationRow>& rows) {
  out << "model,replicate,mu,sigma,tau,gamma\n";
  for (const auto& r : rows)
    out << field(r.model) << ',' << r.replicate << ',' << csv::format(r.ess_mu) << ',' << csv::format(r.ess_sigma)
        << ',' << csv::format(r.ess_tau) << ',' << csv::format(r.ess_gamma) << '\n';
}

}  // namespace edmeta
