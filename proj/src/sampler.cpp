#include "edmeta/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "edmeta/csv.hpp"
#include "edmeta/error.hpp"

namespace edmeta {
namespace {

constexpr double kTargetAcceptance = 0.44;
constexpr double kScaleCeiling = 1e12;
constexpr double kMinAcceptance = 0.01;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double sq(double x) { return x * x; }

inline double normal_lpdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return -kLogSqrt2Pi - std::log(sd) - 0.5 * z * z;
}

// Random-walk proposal scale tuned by Robbins-Monro during burn-in and
// frozen afterwards.
struct AdaptiveScale {
  std::string name;
  double log_sd = std::log(0.5);
  std::size_t proposed = 0;
  std::size_t accepted = 0;

  double sd() const { return std::exp(log_sd); }

  void record(double accept_prob, bool accepted_move, bool adapting, std::size_t t,
              std::size_t window) {
    if (adapting) {
      double gain = std::pow(1.0 + static_cast<double>(t) / static_cast<double>(window), -0.6);
      log_sd += gain * (accept_prob - kTargetAcceptance);
      log_sd = std::clamp(log_sd, -30.0, 10.0);
    } else {
      ++proposed;
      accepted += accepted_move;
    }
  }
};

// One Metropolis step. `log_target` is evaluated on the proposal coordinate.
template <typename F>
double mh_step(double current, double current_lp, AdaptiveScale& scale, RngStream& rng,
               bool adapting, std::size_t t, std::size_t window, F&& log_target, double& out_lp) {
  double proposal = current + scale.sd() * rng.normal();
  double lp = log_target(proposal);
  double log_ratio = lp - current_lp;
  double accept_prob = std::isnan(log_ratio) ? 0.0 : (log_ratio >= 0 ? 1.0 : std::exp(log_ratio));
  bool accept = rng.uniform() < accept_prob;
  scale.record(accept_prob, accept, adapting, t, window);
  if (accept) {
    out_lp = lp;
    return proposal;
  }
  out_lp = current_lp;
  return current;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v), s = 0.0;
  for (double x : v) s += sq(x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Per-family transition kernel over the full parameter vector.
class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual void init(RngStream& rng) = 0;
  virtual void step(RngStream& rng, bool adapting, std::size_t t) = 0;

  std::vector<double> x;
  std::vector<AdaptiveScale> scales;
  std::vector<int> scale_params;  // layout indices that must stay positive

 protected:
  Kernel(const ModelSpec& m, const MetaDataset& d, double w, std::size_t window)
      : m_(m), d_(d), w_(w), window_(window), ix_(layout_index(m, d)) {
    x.assign(layout(m, d).size(), 0.0);
    for (int at : {ix_.tau, ix_.sigma, ix_.gamma})
      if (at >= 0) scale_params.push_back(at);
  }

  // Log-scale Metropolis update of a positive coordinate. `cond` is the
  // natural-scale log conditional density; the Jacobian is added here.
  template <typename F>
  void log_scale_update(int at, AdaptiveScale& scale, RngStream& rng, bool adapting,
                        std::size_t t, F&& cond) {
    double u = std::log(x[at]);
    auto target = [&](double uu) { return cond(std::exp(uu)) + uu; };
    double lp = target(u), out_lp = 0;
    x[at] = std::exp(mh_step(u, lp, scale, rng, adapting, t, window_, target, out_lp));
  }

  const ModelSpec& m_;
  const MetaDataset& d_;
  double w_;
  std::size_t window_;
  LayoutIndex ix_;
};

// Centered NNHM and simulation models B and C. (mu, theta) is drawn jointly
// given the scales: mu with theta integrated out, then theta given mu.
class CenteredKernel final : public Kernel {
 public:
  CenteredKernel(const ModelSpec& m, const MetaDataset& d, double w, std::size_t window)
      : Kernel(m, d, w, window),
        mu_prior_(m.prior(Role::Mu)),
        tau_prior_(m.prior(Role::Tau)),
        unknown_sigma_(m.family == ModelFamily::SimC) {
    if (unknown_sigma_) sigma_prior_ = m.prior(Role::Sigma);
    scales.push_back({"tau"});
    if (unknown_sigma_) scales.push_back({"sigma"});
  }

  void init(RngStream& rng) override {
    double spread = std::max(sd_of(d_.y), 1e-3);
    x[ix_.mu] = mean_of(d_.y) + spread * rng.normal();
    x[ix_.tau] = spread * std::exp(0.5 * rng.normal());
    if (unknown_sigma_) x[ix_.sigma] = 0.5 * spread * std::exp(0.5 * rng.normal());
    for (std::size_t j = 0; j < d_.k(); ++j) x[ix_.effects + j] = d_.y[j];
  }

  void step(RngStream& rng, bool adapting, std::size_t t) override {
    const std::size_t k = d_.k();
    const double tau = x[ix_.tau];
    const double tau2 = tau * tau;
    auto noise_var = [&](std::size_t j) {
      double s = unknown_sigma_ ? x[ix_.sigma] : d_.sigma[j];
      return s * s / w_;
    };

    // mu | tau, y with y_j ~ N(mu, s_j^2 / w + tau^2)
    double prec = 1.0 / mu_prior_.p2, num = mu_prior_.p1 / mu_prior_.p2;
    for (std::size_t j = 0; j < k; ++j) {
      double v = noise_var(j) + tau2;
      prec += 1.0 / v;
      num += d_.y[j] / v;
    }
    double mu = num / prec + rng.normal() / std::sqrt(prec);
    x[ix_.mu] = mu;

    // theta_j | mu, tau, y_j
    for (std::size_t j = 0; j < k; ++j) {
      double nv = noise_var(j);
      double p = 1.0 / nv + 1.0 / tau2;
      double mean = (d_.y[j] / nv + mu / tau2) / p;
      x[ix_.effects + j] = mean + rng.normal() / std::sqrt(p);
    }

    // tau | theta, mu
    double ss = 0.0;
    for (std::size_t j = 0; j < k; ++j) ss += sq(x[ix_.effects + j] - mu);
    const double kk = static_cast<double>(k);
    log_scale_update(ix_.tau, scales[0], rng, adapting, t, [&](double s) {
      return log_pdf(tau_prior_, s) - kk * std::log(s) - 0.5 * ss / (s * s);
    });

    if (unknown_sigma_) {
      double rss = 0.0;
      for (std::size_t j = 0; j < k; ++j) rss += sq(d_.y[j] - x[ix_.effects + j]);
      log_scale_update(ix_.sigma, scales[1], rng, adapting, t, [&](double s) {
        return log_pdf(sigma_prior_, s) + w_ * (-kk * std::log(s) - 0.5 * rss / (s * s));
      });
    }
  }

 private:
  DistSpec mu_prior_, tau_prior_, sigma_prior_;
  bool unknown_sigma_;
};

// theta_j = mu + tau * theta_tilde_j.
class NonCenteredKernel final : public Kernel {
 public:
  NonCenteredKernel(const ModelSpec& m, const MetaDataset& d, double w, std::size_t window)
      : Kernel(m, d, w, window), mu_prior_(m.prior(Role::Mu)), tau_prior_(m.prior(Role::Tau)) {
    scales.push_back({"tau"});
  }

  void init(RngStream& rng) override {
    double spread = std::max(sd_of(d_.y), 1e-3);
    x[ix_.mu] = mean_of(d_.y) + spread * rng.normal();
    x[ix_.tau] = spread * std::exp(0.5 * rng.normal());
    for (std::size_t j = 0; j < d_.k(); ++j) x[ix_.effects + j] = rng.normal();
  }

  void step(RngStream& rng, bool adapting, std::size_t t) override {
    const std::size_t k = d_.k();
    double mu = x[ix_.mu];
    const double tau = x[ix_.tau];

    for (std::size_t j = 0; j < k; ++j) {
      double nv = d_.sigma[j] * d_.sigma[j] / w_;
      double p = 1.0 + tau * tau / nv;
      double mean = tau * (d_.y[j] - mu) / nv / p;
      x[ix_.effects + j] = mean + rng.normal() / std::sqrt(p);
    }

    double prec = 1.0 / mu_prior_.p2, num = mu_prior_.p1 / mu_prior_.p2;
    for (std::size_t j = 0; j < k; ++j) {
      double nv = d_.sigma[j] * d_.sigma[j] / w_;
      prec += 1.0 / nv;
      num += (d_.y[j] - tau * x[ix_.effects + j]) / nv;
    }
    mu = num / prec + rng.normal() / std::sqrt(prec);
    x[ix_.mu] = mu;

    log_scale_update(ix_.tau, scales[0], rng, adapting, t, [&](double s) {
      double ll = 0.0;
      for (std::size_t j = 0; j < k; ++j)
        ll += sq(d_.y[j] - mu - s * x[ix_.effects + j]) / (d_.sigma[j] * d_.sigma[j]);
      return log_pdf(tau_prior_, s) - 0.5 * w_ * ll;
    });
  }

 private:
  DistSpec mu_prior_, tau_prior_;
};

// Simulation model A: y_i ~ N(mu, gamma^2).
class NormalKernel final : public Kernel {
 public:
  NormalKernel(const ModelSpec& m, const MetaDataset& d, double w, std::size_t window)
      : Kernel(m, d, w, window), mu_prior_(m.prior(Role::Mu)), gamma_prior_(m.prior(Role::Gamma)) {
    scales.push_back({"gamma"});
  }

  void init(RngStream& rng) override {
    double spread = std::max(sd_of(d_.y), 1e-3);
    x[ix_.mu] = mean_of(d_.y) + spread * rng.normal();
    x[ix_.gamma] = spread * std::exp(0.5 * rng.normal());
  }

  void step(RngStream& rng, bool adapting, std::size_t t) override {
    const double n = static_cast<double>(d_.k());
    double g2 = sq(x[ix_.gamma]);
    double sum = std::accumulate(d_.y.begin(), d_.y.end(), 0.0);
    double prec = 1.0 / mu_prior_.p2 + w_ * n / g2;
    double mean = (mu_prior_.p1 / mu_prior_.p2 + w_ * sum / g2) / prec;
    double mu = mean + rng.normal() / std::sqrt(prec);
    x[ix_.mu] = mu;

    double rss = 0.0;
    for (double y : d_.y) rss += sq(y - mu);
    log_scale_update(ix_.gamma, scales[0], rng, adapting, t, [&](double s) {
      return log_pdf(gamma_prior_, s) + w_ * (-n * std::log(s) - 0.5 * rss / (s * s));
    });
  }

 private:
  DistSpec mu_prior_, gamma_prior_;
};

// Binomial-logit random effects: one eta per arm row, rows 1..k treatment
// (x = 1) and k+1..2k control (x = 0).
class LogitKernel final : public Kernel {
 public:
  LogitKernel(const ModelSpec& m, const MetaDataset& d, double w, std::size_t window)
      : Kernel(m, d, w, window),
        alpha_prior_(m.prior(Role::Alpha)),
        beta_prior_(m.prior(Role::Beta)),
        tau_prior_(m.prior(Role::Tau)) {
    const std::size_t k = d.k();
    rows_ = 2 * k;
    for (std::size_t r = 0; r < rows_; ++r) {
      bool treat = r < k;
      std::size_t j = treat ? r : r - k;
      z_.push_back(static_cast<double>(treat ? d.events_treat[j] : d.events_control[j]));
      n_.push_back(static_cast<double>(treat ? d.total_treat[j] : d.total_control[j]));
      treat_.push_back(treat);
    }
    scales.push_back({"alpha"});
    scales.push_back({"beta"});
    scales.push_back({"tau"});
    for (std::size_t r = 0; r < rows_; ++r) scales.push_back({"eta[" + std::to_string(r + 1) + "]"});
    for (auto& s : scales) s.log_sd = std::log(0.3);
  }

  void init(RngStream& rng) override {
    double zc = 0, nc = 0;
    for (std::size_t r = 0; r < rows_; ++r)
      if (!treat_[r]) zc += z_[r], nc += n_[r];
    double rate = std::clamp((zc + 0.5) / (nc + 1.0), 1e-3, 1 - 1e-3);
    x[ix_.alpha] = std::log(rate / (1 - rate)) + 0.5 * rng.normal();
    x[ix_.beta] = 0.5 * rng.normal();
    x[ix_.tau] = 0.5 * std::exp(0.5 * rng.normal());
    for (std::size_t r = 0; r < rows_; ++r) x[ix_.effects + r] = 0.1 * rng.normal();
  }

  void step(RngStream& rng, bool adapting, std::size_t t) override {
    const std::size_t k = d_.k();
    double out_lp = 0.0;

    // alpha: every row
    {
      auto target = [&](double a) {
        double ll = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) ll += row_ll(r, a + beta_term(r) + eta(r));
        return w_ * ll + log_pdf(alpha_prior_, a);
      };
      x[ix_.alpha] = mh_step(x[ix_.alpha], target(x[ix_.alpha]), scales[0], rng, adapting, t,
                             window_, target, out_lp);
    }
    // beta: treatment rows only
    {
      auto target = [&](double b) {
        double ll = 0.0;
        for (std::size_t r = 0; r < k; ++r) ll += row_ll(r, x[ix_.alpha] + b + eta(r));
        return w_ * ll + log_pdf(beta_prior_, b);
      };
      x[ix_.beta] = mh_step(x[ix_.beta], target(x[ix_.beta]), scales[1], rng, adapting, t,
                            window_, target, out_lp);
    }
    // eta_r: own row and the latent field
    const double tau = x[ix_.tau];
    for (std::size_t r = 0; r < rows_; ++r) {
      double base = x[ix_.alpha] + beta_term(r);
      auto target = [&](double e) { return w_ * row_ll(r, base + e) - 0.5 * e * e / (tau * tau); };
      double& e = x[ix_.effects + r];
      e = mh_step(e, target(e), scales[3 + r], rng, adapting, t, window_, target, out_lp);
    }
    // tau | eta
    double ss = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) ss += sq(eta(r));
    const double rr = static_cast<double>(rows_);
    log_scale_update(ix_.tau, scales[2], rng, adapting, t, [&](double s) {
      return log_pdf(tau_prior_, s) - rr * std::log(s) - 0.5 * ss / (s * s);
    });
  }

 private:
  double eta(std::size_t r) const { return x[ix_.effects + r]; }
  double beta_term(std::size_t r) const { return treat_[r] ? x[ix_.beta] : 0.0; }

  // Binomial log-mass without the combinatorial constant.
  double row_ll(std::size_t r, double lp) const {
    double log_p = lp >= 0 ? -std::log1p(std::exp(-lp)) : lp - std::log1p(std::exp(lp));
    double log_q = log_p - lp;
    return z_[r] * log_p + (n_[r] - z_[r]) * log_q;
  }

  DistSpec alpha_prior_, beta_prior_, tau_prior_;
  std::size_t rows_ = 0;
  std::vector<double> z_, n_;
  std::vector<bool> treat_;
};

std::unique_ptr<Kernel> make_kernel(const ModelSpec& m, const MetaDataset& d, double w,
                                    std::size_t window) {
  switch (m.family) {
    case ModelFamily::NNHMCentered:
    case ModelFamily::SimB:
    case ModelFamily::SimC:
      return std::make_unique<CenteredKernel>(m, d, w, window);
    case ModelFamily::NNHMNonCentered:
      return std::make_unique<NonCenteredKernel>(m, d, w, window);
    case ModelFamily::SimA:
      return std::make_unique<NormalKernel>(m, d, w, window);
    case ModelFamily::LogitRE:
      return std::make_unique<LogitKernel>(m, d, w, window);
  }
  throw ModelError("no sampler for model family");
}

ChainDraws run_chain(const ModelSpec& m, const MetaDataset& d, const McmcConfig& cfg, double w,
                     std::size_t chain, const ParamLayout& lay) {
  RngStream rng = RngStream(cfg.seed).split(chain);
  auto kernel = make_kernel(m, d, w, cfg.adapt_window);
  kernel->init(rng);

  ChainDraws out;
  const std::size_t kept = cfg.kept_per_chain();
  out.values.reserve(kept * lay.size());
  out.loglik.reserve(kept);

  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    bool adapting = t < cfg.burn_in;
    kernel->step(rng, adapting, t);
    for (int at : kernel->scale_params) {
      double v = kernel->x[at];
      if (!(v > 0.0) || !(v <= kScaleCeiling)) {
        std::ostringstream os;
        os << "chain " << chain + 1 << " iteration " << t + 1 << ": " << lay.names[at] << " = " << v
           << " left (0, 1e12]";
        throw SamplingError(os.str());
      }
    }
    if (!adapting && (t - cfg.burn_in + 1) % cfg.thin == 0 && out.loglik.size() < kept) {
      out.values.insert(out.values.end(), kernel->x.begin(), kernel->x.end());
      out.loglik.push_back(log_likelihood(m, d, kernel->x));
    }
  }

  for (const auto& s : kernel->scales) {
    double rate = s.proposed ? static_cast<double>(s.accepted) / static_cast<double>(s.proposed) : 1.0;
    out.mh_names.push_back(s.name);
    out.acceptance.push_back(rate);
  }
  for (std::size_t i = 0; i < out.acceptance.size(); ++i) {
    if (out.acceptance[i] < kMinAcceptance) {
      std::ostringstream os;
      os << "chain " << chain + 1 << ": acceptance rate of " << out.mh_names[i] << " is "
         << out.acceptance[i] << " after adaptation (minimum " << kMinAcceptance << ")";
      throw SamplingError(os.str());
    }
  }
  return out;
}

}  // namespace

void McmcConfig::validate() const {
  if (chains < 1) throw ParameterError("chains must be >= 1");
  if (thin < 1) throw ParameterError("thin must be >= 1");
  if (burn_in >= iterations) throw ParameterError("burn_in must be smaller than iterations");
  if (adapt_window < 1) throw ParameterError("adapt_window must be >= 1");
  if (kept_per_chain() < 100)
    throw ParameterError("(iterations - burn_in) / thin must be >= 100, got " +
                         std::to_string(kept_per_chain()));
}

std::vector<double> DrawMatrix::column(std::size_t chain, std::size_t param) const {
  std::vector<double> out(kept_per_chain());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(chain, i, param);
  return out;
}

std::vector<std::vector<double>> DrawMatrix::per_chain(std::size_t param) const {
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < n_chains(); ++c) out.push_back(column(c, param));
  return out;
}

std::vector<double> DrawMatrix::pooled(std::size_t param) const {
  std::vector<double> out;
  out.reserve(total());
  for (std::size_t c = 0; c < n_chains(); ++c)
    for (std::size_t i = 0; i < kept_per_chain(); ++i) out.push_back(at(c, i, param));
  return out;
}

std::vector<double> DrawMatrix::pooled_loglik() const {
  std::vector<double> out;
  out.reserve(total());
  for (const auto& c : chains) out.insert(out.end(), c.loglik.begin(), c.loglik.end());
  return out;
}

DrawMatrix run(const ModelSpec& m, const MetaDataset& d, const McmcConfig& cfg, double weight) {
  cfg.validate();
  validate(m);
  validate(d);
  if (!(weight > 0.0) || !std::isfinite(weight)) throw ParameterError("weight must be positive");

  DrawMatrix out;
  out.layout = layout(m, d);
  out.config = cfg;
  out.weight = weight;
  out.chains.resize(cfg.chains);

  std::vector<std::exception_ptr> errors(cfg.chains);
  std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cfg.chains);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < cfg.chains;) {
      try {
        out.chains[c] = run_chain(m, d, cfg, weight, c, out.layout);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double audit_loglik(const ModelSpec& m, const MetaDataset& d, const DrawMatrix& draws) {
  double worst = 0.0;
  const std::size_t p = draws.layout.size();
  for (const auto& c : draws.chains) {
    for (std::size_t i = 0; i < c.loglik.size(); ++i) {
      ParamVector v(c.values.data() + i * p, p);
      double fresh = log_likelihood(m, d, v);
      double rel = std::abs(fresh - c.loglik[i]) / std::max(1.0, std::abs(fresh));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

void write_draws_csv(std::ostream& out, const DrawMatrix& draws) {
  out << "chain,iter";
  for (const auto& n : draws.layout.names) out << ',' << n;
  out << ",loglik\n";
  const std::size_t p = draws.layout.size();
  for (std::size_t c = 0; c < draws.n_chains(); ++c) {
    const auto& ch = draws.chains[c];
    for (std::size_t i = 0; i < ch.loglik.size(); ++i) {
      out << c + 1 << ',' << draws.config.burn_in + (i + 1) * draws.config.thin;
      for (std::size_t j = 0; j < p; ++j) out << ',' << csv::format(ch.values[i * p + j]);
      out << ',' << csv::format(ch.loglik[i]) << '\n';
    }
  }
}

DrawMatrix read_draws_csv(std::istream& in, const std::string& name) {
  auto fail = [&](std::size_t line, const std::string& why) {
    return IoError(name + ":" + std::to_string(line) + ": " + why);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail(1, "missing header");
  auto header = csv::split_line(line);
  if (header.size() < 4 || header[0] != "chain" || header[1] != "iter" || header.back() != "loglik")
    throw fail(1, "header must be chain,iter,<params...>,loglik");

  DrawMatrix out;
  for (std::size_t i = 2; i + 1 < header.size(); ++i) {
    const std::string& n = header[i];
    out.layout.names.push_back(n);
    bool scale = n == "tau" || n == "sigma" || n == "gamma";
    out.layout.scale_tags.push_back(scale ? ScaleTag::LogPrecision : ScaleTag::Identity);
  }
  const std::size_t p = out.layout.size();
  std::size_t lineno = 1;
  long last_chain = 0;
  std::vector<long> first_iters;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = csv::split_line(line);
    if (f.size() != header.size()) throw fail(lineno, "wrong number of fields");
    long chain = 0;
    if (!csv::parse(f[0], chain) || chain < 1) throw fail(lineno, "invalid chain index");
    if (chain != last_chain) {
      if (chain != last_chain + 1) throw fail(lineno, "chains must be contiguous and ordered");
      out.chains.emplace_back();
      last_chain = chain;
    }
    auto& ch = out.chains.back();
    if (chain == 1 && first_iters.size() < 2) {
      long it = 0;
      if (!csv::parse(f[1], it) || it < 1) throw fail(lineno, "invalid iteration");
      first_iters.push_back(it);
    }
    for (std::size_t j = 0; j < p; ++j) {
      double v = 0;
      if (!csv::parse(f[2 + j], v)) throw fail(lineno, "invalid number");
      ch.values.push_back(v);
    }
    double ll = 0;
    if (!csv::parse(f.back(), ll)) throw fail(lineno, "invalid loglik");
    ch.loglik.push_back(ll);
  }
  for (const auto& c : out.chains)
    if (c.loglik.size() != out.chains[0].loglik.size())
      throw IoError(name + ": chains have different lengths");
  // The iteration column carries burn-in and thinning: iter = burn_in + i * thin.
  out.config.chains = out.chains.size();
  if (first_iters.size() == 2 && first_iters[1] > first_iters[0]) {
    out.config.thin = static_cast<std::size_t>(first_iters[1] - first_iters[0]);
  } else {
    out.config.thin = 1;
  }
  if (!first_iters.empty()) {
    long burn = first_iters[0] - static_cast<long>(out.config.thin);
    if (burn < 0) throw IoError(name + ": iteration numbers inconsistent with thinning");
    out.config.burn_in = static_cast<std::size_t>(burn);
    out.config.iterations = out.config.burn_in + out.kept_per_chain() * out.config.thin;
  }
  return out;
}

}  // namespace edmeta
