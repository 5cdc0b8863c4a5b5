#pragma once

// Gibbs samplers for the three-parameter Weibull and four-parameter JSB
// distributions. Conjugate draws where the structure allows (the Weibull rate
// given shape and location; the JSB normal parameters on the logit scale),
// Metropolis-within-Gibbs elsewhere. Point estimates are posterior means of
// the retained draws.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "difit/common.hpp"
#include "difit/distributions.hpp"
#include "difit/gof.hpp"
#include "difit/rng.hpp"
#include "difit/stats.hpp"
#include "difit/weibull_fit.hpp"

namespace difit {

struct McmcConfig {
  int n_simul = 10000;
  int n_burn = 8000;
  std::uint64_t seed = 1;

  void validate() const {
    require(n_burn > 0 && n_burn < n_simul, "mcmc: need 0 < n_burn < n_simul");
  }
};

struct BayesFit {
  ParamVector estimate;  // posterior means
  GofBlock measures;     // AD, CVM, KS, log-likelihood at the estimate
  std::vector<std::vector<double>> traces;  // one retained chain per parameter
};

namespace bayes_detail {

/// Scale adapter: every 100 burn-in proposals nudge the step toward a
/// 30-40% acceptance rate; frozen once the burn-in ends.
struct StepScale {
  double sigma;
  int proposals = 0, accepts = 0;

  void record(bool accepted, bool adapting) {
    ++proposals;
    if (accepted) ++accepts;
    if (adapting && proposals % 100 == 0) {
      double rate = static_cast<double>(accepts) / proposals;
      if (rate < 0.30) sigma *= 0.8;
      else if (rate > 0.40) sigma *= 1.25;
      proposals = 0;
      accepts = 0;
    }
  }
  double rate() const {
    return proposals > 0 ? static_cast<double>(accepts) / proposals : 0.0;
  }
};

inline void finish(BayesFit& fit, const Sample& data, FamilyTag family,
                   const std::vector<StepScale*>& scales) {
  std::size_t K = fit.traces.size();
  fit.estimate.assign(K, 0.0);
  for (std::size_t j = 0; j < K; ++j) {
    for (double v : fit.traces[j]) fit.estimate[j] += v;
    fit.estimate[j] /= static_cast<double>(fit.traces[j].size());
  }
  double ll = 0.0;
  for (double x : data) ll += log_pdf(family, fit.estimate, x);
  fit.measures.log_likelihood = ll;
  auto edf = edf_statistics(data, family, fit.estimate);
  fit.measures.ad = edf.ad;
  fit.measures.cvm = edf.cvm;
  fit.measures.ks = edf.ks;
  if (edf.clamped) fit.measures.diagnostics.push_back("edf: boundary u-values clamped");
  for (const StepScale* s : scales) {
    double r = s->rate();
    if (r < 0.05 || r > 0.95)
      fit.measures.diagnostics.push_back(
          "metropolis acceptance rate " + std::to_string(r) + " outside [0.05, 0.95]");
  }
}

}  // namespace bayes_detail

inline BayesFit fit_bayes_weibull(const Sample& data, McmcConfig cfg = {}) {
  cfg.validate();
  require(data.size() >= 10, "fit_bayes_weibull: need at least 10 observations");
  for (double v : data) require(v > 0.0, "fit_bayes_weibull: data must be positive");
  require(stats::count_distinct(data) >= 2, "fit_bayes_weibull: degenerate data (all equal)");

  const double n = static_cast<double>(data.size());
  const double xmin = stats::min(data);
  const double a0 = 0.001, b0 = 0.001;  // vague gamma hyperparameters

  RngStream rng(cfg.seed);
  ParamVector init = weibull_detail::default_starts3(data);
  double alpha = init[0], mu = init[2];
  double lambda = std::pow(init[1], -alpha);

  auto sums = [&](double a, double m, double& s_ln, double& s_pow) {
    s_ln = 0.0;
    s_pow = 0.0;
    for (double x : data) {
      double z = x - m;
      s_ln += std::log(z);
      s_pow += std::pow(z, a);
    }
  };
  auto alpha_logpost = [&](double a, double m) {
    double s_ln, s_pow;
    sums(a, m, s_ln, s_pow);
    return n * std::log(a) + (a - 1.0) * s_ln - lambda * s_pow + (a0 - 1.0) * std::log(a) -
           b0 * a;
  };
  auto mu_loglik = [&](double a, double m) {
    if (m >= xmin) return -std::numeric_limits<double>::infinity();
    double s_ln, s_pow;
    sums(a, m, s_ln, s_pow);
    return (a - 1.0) * s_ln - lambda * s_pow;
  };

  bayes_detail::StepScale step_a{0.2}, step_mu{0.1 * (xmin - mu) + 1e-3};
  BayesFit fit;
  fit.traces.assign(3, {});
  for (auto& t : fit.traces) t.reserve(static_cast<std::size_t>(cfg.n_simul - cfg.n_burn));

  for (int it = 0; it < cfg.n_simul; ++it) {
    bool adapting = it < cfg.n_burn;
    // rate given shape and location: conjugate gamma draw
    double s_ln, s_pow;
    sums(alpha, mu, s_ln, s_pow);
    lambda = rng.gamma(a0 + n, 1.0 / (b0 + s_pow));
    // shape: log-normal proposal
    {
      double prop = alpha * std::exp(step_a.sigma * rng.normal());
      double lr = alpha_logpost(prop, mu) - alpha_logpost(alpha, mu) +
                  std::log(prop / alpha);  // proposal asymmetry
      bool acc = std::log(rng.uniform()) < lr;
      if (acc) alpha = prop;
      step_a.record(acc, adapting);
    }
    // location: random walk below the sample minimum, flat prior
    {
      double prop = mu + step_mu.sigma * rng.normal();
      double lr = mu_loglik(alpha, prop) - mu_loglik(alpha, mu);
      bool acc = std::log(rng.uniform()) < lr;
      if (acc) mu = prop;
      step_mu.record(acc, adapting);
    }
    if (it >= cfg.n_burn) {
      fit.traces[0].push_back(alpha);
      fit.traces[1].push_back(std::pow(lambda, -1.0 / alpha));
      fit.traces[2].push_back(mu);
    }
  }
  bayes_detail::finish(fit, data, FamilyTag::weibull, {&step_a, &step_mu});
  return fit;
}

/// Optional `fixed` pins (lambda, xi), reducing the sampler to the conjugate
/// normal draws on the logit scale.
inline BayesFit fit_bayes_jsb(const Sample& data, McmcConfig cfg = {},
                              std::optional<std::pair<double, double>> fixed = std::nullopt) {
  cfg.validate();
  require(data.size() >= 10, "fit_bayes_jsb: need at least 10 observations");
  require(stats::count_distinct(data) >= 2, "fit_bayes_jsb: degenerate data (all equal)");

  const double n = static_cast<double>(data.size());
  const double xmin = stats::min(data);
  double xmax = data[0];
  for (double v : data) xmax = std::max(xmax, v);
  const double range = xmax - xmin;
  const double a0 = 0.001, b0 = 0.001;

  RngStream rng(cfg.seed);
  double xi = fixed ? fixed->second : xmin - 0.05 * range;
  double lambda_p = fixed ? fixed->first : 1.1 * range + (xmin - xi);
  require(xi < xmin && xi + lambda_p > xmax,
          "fit_bayes_jsb: support bounds exclude the data");
  double delta = 1.0, gamma_p = 0.0;

  auto loglik = [&](double d, double g, double l, double z) {
    ParamVector p{d, g, l, z};
    if (!(d > 0.0 && l > 0.0 && z < xmin && z + l > xmax))
      return -std::numeric_limits<double>::infinity();
    double ll = 0.0;
    for (double x : data) ll += log_pdf(FamilyTag::jsb, p, x);
    return ll;
  };

  bayes_detail::StepScale step_l{0.05 * range + 1e-3}, step_xi{0.05 * range + 1e-3};
  BayesFit fit;
  fit.traces.assign(4, {});
  for (auto& t : fit.traces) t.reserve(static_cast<std::size_t>(cfg.n_simul - cfg.n_burn));

  std::vector<double> y(data.size());
  for (int it = 0; it < cfg.n_simul; ++it) {
    bool adapting = it < cfg.n_burn;
    // logit transforms at the current (lambda, xi)
    for (std::size_t i = 0; i < data.size(); ++i) {
      double u = (data[i] - xi) / lambda_p;
      y[i] = std::log(u / (1.0 - u));
    }
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= n;
    double ss = 0.0;
    for (double v : y) ss += (v - ybar) * (v - ybar);
    // y ~ N(m, v): conjugate draws with vague priors, then map back
    double v_inv = rng.gamma(a0 + 0.5 * n, 1.0 / (b0 + 0.5 * ss));
    double v = 1.0 / v_inv;
    double m = ybar + std::sqrt(v / n) * rng.normal();
    delta = 1.0 / std::sqrt(v);
    gamma_p = -m / std::sqrt(v);

    if (!fixed) {
      {
        double prop = lambda_p + step_l.sigma * rng.normal();
        double lr = loglik(delta, gamma_p, prop, xi) - loglik(delta, gamma_p, lambda_p, xi);
        bool acc = std::log(rng.uniform()) < lr;
        if (acc) lambda_p = prop;
        step_l.record(acc, adapting);
      }
      {
        double prop = xi + step_xi.sigma * rng.normal();
        double lr = loglik(delta, gamma_p, lambda_p, prop) -
                    loglik(delta, gamma_p, lambda_p, xi);
        bool acc = std::log(rng.uniform()) < lr;
        if (acc) xi = prop;
        step_xi.record(acc, adapting);
      }
    }
    if (it >= cfg.n_burn) {
      fit.traces[0].push_back(delta);
      fit.traces[1].push_back(gamma_p);
      fit.traces[2].push_back(lambda_p);
      fit.traces[3].push_back(xi);
    }
  }
  std::vector<bayes_detail::StepScale*> scales;
  if (!fixed) scales = {&step_l, &step_xi};
  bayes_detail::finish(fit, data, FamilyTag::jsb, scales);
  return fit;
}

}  // namespace difit
