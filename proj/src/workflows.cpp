#include "edmeta/workflows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "edmeta/error.hpp"
#include "edmeta/oracle.hpp"
#include "edmeta/rlmc.hpp"

namespace edmeta {
namespace {

// Console number, NA when undefined.
std::string num(double v, const char* spec) {
  return std::isnan(v) ? std::string("NA") : fmt::format(fmt::runtime(spec), v);
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

bool is_latent(const std::string& name) { return name.find('[') != std::string::npos; }

// All files are rendered before the first one is written; each is written
// to a temporary name and renamed into place.
void write_files(const std::filesystem::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create output directory: " + ec.message());
  for (const auto& [name, content] : files) {
    auto path = dir / name;
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw IoError(tmp.string() + ": cannot open for writing");
      f << content;
      if (!f) throw IoError(tmp.string() + ": write failed");
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path.string() + ": " + ec.message());
  }
}

template <class F>
std::string render(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

MetaDataset effects_for(const ModelSpec& m, MetaDataset d, std::ostream& out) {
  if (d.kind == DataKind::BinomialArms && data_kind_for(m.family) == DataKind::NormalEffects) {
    out << "note: converting arm-level counts to log odds ratios\n";
    return log_odds_ratios(d);
  }
  return d;
}

Json priors_json(const ModelSpec& m) {
  Json p = Json::object();
  for (Role r : required_roles(m.family)) p[std::string(to_string(r))] = to_string(m.prior(r));
  return p;
}

Json mcmc_json(const McmcConfig& c) {
  return Json{{"chains", c.chains}, {"iterations", c.iterations}, {"burn_in", c.burn_in},
              {"thin", c.thin},     {"seed", c.seed},             {"adapt_window", c.adapt_window}};
}

}  // namespace

AnalysisOptions analysis_options(const RunConfig& cfg) {
  AnalysisOptions o;
  o.mcmc = cfg.mcmc;
  o.delta = cfg.delta;
  o.method = cfg.method;
  o.escalate = cfg.escalate;
  o.rhat_threshold = cfg.rhat_threshold;
  return o;
}

int AnalysisResult::exit_code() const { return rhat_failed || !determinacy ? 2 : 0; }

AnalysisResult analyze(const ModelSpec& model, const MetaDataset& data, const AnalysisOptions& opt) {
  if (!(opt.delta > 0.0 && opt.delta <= 0.1)) throw ParameterError("delta must lie in (0, 0.1]");
  AnalysisResult r;
  r.model = model;
  r.draws = run(model, data, opt.mcmc);
  r.loglik_audit = audit_loglik(model, data, r.draws);
  r.diagnostics = diagnose(r.draws);
  for (const auto& p : r.diagnostics.params)
    if (!p.error.empty()) r.warnings.push_back("diagnostics for " + p.name + ": " + p.error);
  double rhat = r.diagnostics.max_rhat();
  if (rhat > opt.rhat_threshold) {
    r.rhat_failed = true;
    r.warnings.push_back(fmt::format("max split R-hat {:.4f} exceeds {}", rhat, opt.rhat_threshold));
  }

  RefitInputs inputs{model, data, opt.mcmc};
  auto reweighted = [&]() -> std::optional<DeterminacyReport> {
    try {
      return determinacy(r.draws, opt.delta, Method::Reweight);
    } catch (const DegenerateWeightsError& e) {
      r.weights_degenerate = true;
      r.warnings.push_back(e.what());
      return std::nullopt;
    }
  };
  switch (opt.method) {
    case MethodChoice::Reweight:
      r.determinacy = reweighted();
      if (!r.determinacy && opt.escalate) {
        r.determinacy = determinacy(r.draws, opt.delta, Method::Refit, &inputs);
        r.escalated = true;
        r.warnings.push_back("escalated to refit at 1 -/+ delta");
      }
      break;
    case MethodChoice::Refit:
      r.determinacy = determinacy(r.draws, opt.delta, Method::Refit, &inputs);
      break;
    case MethodChoice::Both: {
      auto rw = reweighted();
      auto rf = determinacy(r.draws, opt.delta, Method::Refit, &inputs);
      if (rw) {
        r.determinacy = std::move(rw);
        r.comparison = std::move(rf);
      } else {
        r.determinacy = std::move(rf);
        r.escalated = true;
      }
      break;
    }
  }
  if (r.determinacy)
    for (const auto& w : r.determinacy->warnings) r.warnings.push_back(w);
  if (!r.weights_degenerate) {
    try {
      r.sweep = delta_sweep(r.draws, opt.sweep_deltas);
    } catch (const DegenerateWeightsError& e) {
      r.warnings.push_back(std::string("delta sweep skipped: ") + e.what());
    }
  }
  r.rows = summary_rows(r.draws, r.diagnostics, r.determinacy ? &*r.determinacy : nullptr);
  return r;
}

Json report_json(const AnalysisResult& r, const RunConfig& cfg, const std::string& data_label) {
  Json j;
  j["format"] = "edmeta-report";
  j["version"] = 1;
  j["model"] = cfg.model;
  j["family"] = to_string(r.model.family);
  j["priors"] = priors_json(r.model);
  j["data"] = data_label;
  j["mcmc"] = mcmc_json(r.draws.config);
  j["delta"] = cfg.delta;
  j["method"] = to_string(cfg.method);
  j["method_used"] = r.determinacy ? Json(std::string(to_string(r.determinacy->method))) : Json(nullptr);
  j["escalated"] = r.escalated;
  j["status"] = r.exit_code() == 0 ? "ok" : "diagnostic-failure";
  j["exit_code"] = r.exit_code();
  if (r.determinacy)
    j["kish_ess"] = Json{{"minus", num(r.determinacy->kish_ess_minus)},
                         {"plus", num(r.determinacy->kish_ess_plus)},
                         {"draws", r.determinacy->draws}};
  else
    j["kish_ess"] = nullptr;
  j["warnings"] = r.warnings;
  j["parameters"] = to_json(r.rows);
  if (r.comparison) {
    auto rows = summary_rows(r.draws, r.diagnostics, &*r.comparison);
    j["comparison"] = Json{{"method", std::string(to_string(r.comparison->method))}, {"parameters", to_json(rows)}};
  }
  AnalysisOptions defaults;
  j["delta_sweep"] = r.sweep.empty() ? Json(nullptr) : to_json(r.sweep, defaults.sweep_deltas);
  return j;
}

Json diagnostics_json(const AnalysisResult& r, double rhat_threshold) {
  Json j = to_json(r.diagnostics);
  Json out;
  out["rhat_threshold"] = rhat_threshold;
  out["rhat_failed"] = r.rhat_failed;
  out["loglik_audit"] = num(r.loglik_audit);
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value();
  return out;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    ModelSpec model = resolve_model(cfg);
    MetaDataset data = effects_for(model, load_dataset(cfg.data), out);
    AnalysisResult r = analyze(model, data, analysis_options(cfg));

    std::vector<std::pair<std::string, std::string>> files{
        {"report.json", render([&](std::ostream& s) { write_json(s, report_json(r, cfg, cfg.data)); })},
        {"summary.csv", render([&](std::ostream& s) { write_summary_csv(s, r.rows); })},
        {"diagnostics.json", render([&](std::ostream& s) { write_json(s, diagnostics_json(r, cfg.rhat_threshold)); })},
    };
    if (cfg.save_draws) files.emplace_back("draws.csv", render([&](std::ostream& s) { write_draws_csv(s, r.draws); }));
    write_files(cfg.out, files);

    out << fmt::format("{:<14} {:>9} {:>9} {:>10} {:>7} {:>7} {:>8}\n", "param", "mean", "sd", "TED", "pEDL",
                       "pEDS", "ESS");
    for (const auto& row : r.rows) {
      if (is_latent(row.param)) continue;
      out << fmt::format("{:<14} {:>9} {:>9} {:>10} {:>7} {:>7} {:>8}\n", row.param, num(row.mean, "{:.4f}"),
                         num(row.sd, "{:.4f}"), num(row.ted, "{:.3g}"), num(row.pedl, "{:.3f}"),
                         num(row.peds, "{:.3f}"), num(row.ess, "{:.0f}"));
    }
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    out << "wrote " << (cfg.out / "report.json").string() << '\n';
    return r.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

TransitionResult transition(const RunConfig& cfg, const MetaDataset& data) {
  if (data.kind != DataKind::NormalEffects) throw DataError("transition needs study effects with standard deviations");
  validate(data);
  for (double t : cfg.rlmc_targets)
    if (!(t > 0.0 && t < 1.0)) throw ParameterError("RLMC targets must lie in (0, 1)");
  RunConfig base_cfg = cfg;
  base_cfg.priors.erase(Role::Tau);
  if (parse_model_family(cfg.model) != ModelFamily::NNHMCentered &&
      parse_model_family(cfg.model) != ModelFamily::NNHMNonCentered)
    base_cfg.model = "nnhm-centered";
  const DistSpec mu_prior = resolve_model(base_cfg).prior(Role::Mu);

  TransitionResult out;
  out.grid = solve_grid(cfg.rlmc_targets, data.sigma, cfg.rlmc_family, cfg.rlmc_functional);
  AnalysisOptions opt = analysis_options(cfg);
  for (std::size_t i = 0; i < out.grid.targets.size(); ++i) {
    double scale = out.grid.solved_scales[i];
    DistSpec tau = cfg.rlmc_family == Family::HalfCauchy ? DistSpec::half_cauchy(scale) : DistSpec::half_normal(scale);
    for (const auto& par : cfg.parametrizations) {
      TransitionRun run_i{out.grid.targets[i], scale, par, std::nullopt, {}};
      ModelSpec m{parse_model_family(par), {{Role::Mu, mu_prior}, {Role::Tau, tau}}};
      try {
        run_i.result = analyze(m, data, opt);
        const auto& r = *run_i.result;
        std::string status = "ok";
        if (r.exit_code() != 0)
          status = r.rhat_failed ? fmt::format("diagnostic-failure: max R-hat {:.4f}", r.diagnostics.max_rhat())
                                 : std::string("diagnostic-failure: degenerate weights");
        for (const auto& row : r.rows)
          if (!is_latent(row.param))
            out.rows.push_back({run_i.target, scale, par, row.param, row.ted, row.pedl, row.peds, status});
      } catch (const Error& e) {
        run_i.error = e.what();
        for (const char* p : {"mu", "log(tau^-2)"})
          out.rows.push_back({run_i.target, scale, par, p, NAN, NAN, NAN, std::string("error: ") + e.what()});
      }
      out.runs.push_back(std::move(run_i));
    }
  }
  return out;
}

int cmd_transition(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    MetaDataset data = load_dataset(cfg.data);
    if (data.kind == DataKind::BinomialArms) data = log_odds_ratios(data);
    TransitionResult t = transition(cfg, data);
    std::size_t failed = 0, flagged = 0;
    for (const auto& r : t.runs) {
      if (!r.result) {
        ++failed;
        err << fmt::format("error at scale {:.4g} ({}): {}\n", r.scale, r.parametrization, r.error);
      } else if (r.result->exit_code() != 0) {
        ++flagged;
      }
    }
    if (failed == t.runs.size()) {
      err << "error: every transition run failed\n";
      return 1;
    }
    write_files(cfg.out, {{"transition.csv", render([&](std::ostream& s) { write_transition_csv(s, t.rows); })},
                          {"transition_grid.csv", render([&](std::ostream& s) { write_grid_csv(s, t.grid); })}});
    out << fmt::format("{:>8} {:>9} {:<17} {:<12} {:>10} {:>7} {:>7}\n", "target", "scale", "parametrization",
                       "param", "TED", "pEDL", "pEDS");
    for (const auto& r : t.rows)
      out << fmt::format("{:>8.3f} {:>9.4f} {:<17} {:<12} {:>10} {:>7} {:>7}\n", r.rlmc_target, r.scale,
                         r.parametrization, r.param, num(r.ted, "{:.3g}"), num(r.pedl, "{:.3f}"),
                         num(r.peds, "{:.3f}"));
    out << "wrote " << (cfg.out / "transition.csv").string() << '\n';
    return failed + flagged > 0 ? 2 : 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

MetaDataset simulation_dataset(const RunConfig& cfg, std::size_t replicate) {
  RngStream rng(cfg.mcmc.seed, 1000 + replicate);
  return simulate_nnhm(cfg.sim_mu, cfg.sim_tau, cfg.sim_sigma, cfg.sim_n, rng);
}

SimulationResult simulate(const RunConfig& cfg) {
  if (cfg.replicates == 0) throw ParameterError("replicates must be at least 1");
  SimulationResult out;
  AnalysisOptions opt = analysis_options(cfg);
  for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
    out.datasets.push_back(simulation_dataset(cfg, rep));
    const MetaDataset& data = out.datasets.back();
    for (const auto& name : cfg.sim_models) {
      ModelSpec m = simulation_model(name);
      auto req = required_roles(m.family);
      for (const auto& [role, dist] : cfg.priors)
        if (std::find(req.begin(), req.end(), role) != req.end()) m.priors[role] = dist;
      SimulationRow row;
      row.model = name;
      row.replicate = rep;
      try {
        validate(m);
        AnalysisResult r = analyze(m, data, opt);
        row.method = r.determinacy ? std::string(to_string(r.determinacy->method)) : "none";
        for (const auto& s : r.rows) {
          auto set = [&](double& ted, double* pedl, double* peds) {
            ted = s.ted;
            if (pedl) *pedl = s.pedl;
            if (peds) *peds = s.peds;
          };
          if (s.param == "mu") set(row.ted_mu, &row.pedl_mu, &row.peds_mu), row.ess_mu = s.ess;
          if (s.param == "log(sigma^-2)") set(row.ted_sigma, &row.pedl_sigma, &row.peds_sigma), row.ess_sigma = s.ess;
          if (s.param == "log(tau^-2)") set(row.ted_tau, &row.pedl_tau, &row.peds_tau), row.ess_tau = s.ess;
          if (s.param == "log(gamma^-2)") set(row.ted_gamma, &row.pedl_gamma, &row.peds_gamma), row.ess_gamma = s.ess;
        }
        row.max_rhat = r.diagnostics.max_rhat();
        row.min_ess = r.diagnostics.min_ess();
        std::vector<std::string> flags;
        if (r.rhat_failed) flags.push_back("rhat");
        if (row.min_ess < 1000.0) flags.push_back("low-ess");
        if (r.diagnostics.min_rank_p() < 0.001) flags.push_back("rank-histogram");
        if (r.weights_degenerate) flags.push_back("degenerate-weights");
        if (r.escalated) flags.push_back("refit");
        for (std::size_t i = 0; i < flags.size(); ++i) row.flags += (i ? ";" : "") + flags[i];
        row.status = r.exit_code() == 0 ? "ok" : "diagnostic-failure";
      } catch (const Error& e) {
        row.method = "none";
        row.status = std::string("error: ") + e.what();
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    SimulationResult s = simulate(cfg);
    std::vector<std::pair<std::string, std::string>> files{
        {"simulation.csv", render([&](std::ostream& o) { write_simulation_csv(o, s.rows); })},
        {"simulation_ess.csv", render([&](std::ostream& o) { write_ess_csv(o, s.rows); })},
    };
    for (std::size_t r = 0; r < s.datasets.size(); ++r)
      files.emplace_back(fmt::format("simulation_data_{}.csv", r),
                         render([&](std::ostream& o) { write_dataset_csv(o, s.datasets[r]); }));
    write_files(cfg.out, files);
    bool all_failed = true;
    out << fmt::format("{:<6} {:>4} {:>9} {:>9} {:>9} {:>7} {:>7} {:>7}  {}\n", "model", "rep", "TED(mu)",
                       "TED(s*)", "TED(t*)", "pEDS(mu)", "pEDL(t*)", "minESS", "flags");
    for (const auto& row : s.rows) {
      if (row.status.rfind("error", 0) != 0) all_failed = false;
      else err << "error in model " << row.model << ": " << row.status << '\n';
      out << fmt::format("{:<6} {:>4} {:>9} {:>9} {:>9} {:>7} {:>7} {:>7}  {}\n", row.model, row.replicate,
                         num(row.ted_mu, "{:.3g}"), num(row.ted_sigma, "{:.3g}"), num(row.ted_tau, "{:.3g}"),
                         num(row.peds_mu, "{:.3f}"), num(row.pedl_tau, "{:.3f}"), num(row.min_ess, "{:.0f}"),
                         row.flags);
    }
    out << "wrote " << (cfg.out / "simulation.csv").string() << '\n';
    return all_failed ? 1 : 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_oracle_check(std::ostream& out) {
  auto results = oracle::run_checks(out);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  out << (failed ? fmt::format("{} of {} oracle checks failed\n", failed, results.size())
                 : fmt::format("all {} oracle checks passed\n", results.size()));
  return failed ? 1 : 0;
}

}  // namespace edmeta
