#pragma once

// Gamma shape mixture: K gamma components with shapes 1..K and a common rate,
// mixed by a weight vector. Density/distribution/sampling plus EM fitting.

#include <cmath>
#include <vector>

#include "difit/common.hpp"
#include "difit/gof.hpp"
#include "difit/rng.hpp"
#include "difit/special.hpp"

namespace difit {

struct GsmSpec {
  std::vector<double> weights;  // omega_1..omega_K
  double beta = 1.0;            // common rate

  std::size_t component_count() const { return weights.size(); }

  void validate() const {
    require(!weights.empty(), "gsm: need at least one weight");
    require(beta > 0.0, "gsm: rate beta must be > 0");
    double sum = 0.0;
    for (double w : weights) {
      require(w >= 0.0, "gsm: weights must be nonnegative");
      sum += w;
    }
    require(std::fabs(sum - 1.0) < 1e-9, "gsm: weights must sum to one");
  }
};

inline double gsm_pdf(const GsmSpec& s, double x, bool log_flag = false) {
  s.validate();
  require(x >= 0.0, "gsm_pdf: x must be nonnegative");
  double f = 0.0;
  for (std::size_t j = 1; j <= s.component_count(); ++j) {
    double w = s.weights[j - 1];
    if (w == 0.0) continue;
    if (x == 0.0) {
      if (j == 1) f += w * s.beta;
      continue;
    }
    double lf = j * std::log(s.beta) + (j - 1.0) * std::log(x) - s.beta * x -
                std::lgamma(static_cast<double>(j));
    f += w * std::exp(lf);
  }
  return log_flag ? std::log(f) : f;
}

inline double gsm_cdf(const GsmSpec& s, double x, bool lower_tail = true,
                      bool log_p = false) {
  s.validate();
  require(x >= 0.0, "gsm_cdf: x must be nonnegative");
  double p = 0.0;
  for (std::size_t j = 1; j <= s.component_count(); ++j) {
    double w = s.weights[j - 1];
    if (w == 0.0) continue;
    double u = lower_tail ? special::gamma_p(static_cast<double>(j), s.beta * x)
                          : special::gamma_q(static_cast<double>(j), s.beta * x);
    p += w * u;
  }
  return log_p ? std::log(p) : p;
}

inline Sample gsm_sample(const GsmSpec& s, std::size_t n, RngStream& rng) {
  s.validate();
  Sample out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform(), acc = 0.0;
    std::size_t j = s.component_count();
    for (std::size_t k = 1; k <= s.component_count(); ++k) {
      acc += s.weights[k - 1];
      if (u <= acc) {
        j = k;
        break;
      }
    }
    out.push_back(rng.gamma(static_cast<double>(j), 1.0 / s.beta));
  }
  return out;
}

struct GsmFit {
  GsmSpec estimate;
  GofBlock measures;
  int iterations = 0;
  std::vector<double> em_trace;
};

inline GsmFit fit_gsm(const Sample& data, std::size_t K) {
  require(K >= 1, "fit_gsm: K must be >= 1");
  require(!data.empty(), "fit_gsm: data must be nonempty");
  double sx = 0.0;
  for (double v : data) {
    require(v > 0.0, "fit_gsm: data must be positive");
    sx += v;
  }
  const std::size_t n = data.size();

  GsmSpec spec;
  spec.weights.assign(K, 1.0 / static_cast<double>(K));
  spec.beta = (static_cast<double>(K) + 1.0) / 2.0 * static_cast<double>(n) / sx;

  auto loglik = [&](const GsmSpec& s) {
    double ll = 0.0;
    for (double x : data) {
      double f = gsm_pdf(s, x);
      if (f <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += std::log(f);
    }
    return ll;
  };

  GsmFit fit;
  std::vector<double> lgam(K + 1), lx(n);
  for (std::size_t j = 1; j <= K; ++j) lgam[j] = std::lgamma(static_cast<double>(j));
  for (std::size_t i = 0; i < n; ++i) lx[i] = std::log(data[i]);

  // one EM update; also returns the log-likelihood at the input parameters
  auto em_step = [&](const GsmSpec& s, double& ll_at_input) {
    std::vector<double> wsum(K, 0.0), tau(K);
    double shape_total = 0.0, ll = 0.0;
    double lb = std::log(s.beta);
    for (std::size_t i = 0; i < n; ++i) {
      double tot = 0.0;
      for (std::size_t j = 1; j <= K; ++j) {
        double w = s.weights[j - 1];
        double t = 0.0;
        if (w > 0.0)
          t = w * std::exp(j * lb - s.beta * data[i] - lgam[j] +
                           (j == 1 ? 0.0 : (j - 1.0) * lx[i]));
        tau[j - 1] = t;
        tot += t;
      }
      ll += std::log(tot);
      for (std::size_t j = 0; j < K; ++j) {
        double r = tau[j] / tot;
        wsum[j] += r;
        shape_total += r * static_cast<double>(j + 1);
      }
    }
    ll_at_input = ll;
    GsmSpec out;
    out.weights.resize(K);
    for (std::size_t j = 0; j < K; ++j) out.weights[j] = wsum[j] / static_cast<double>(n);
    out.beta = shape_total / sx;
    return out;
  };
  auto project = [&](GsmSpec s) {
    double sum = 0.0;
    for (double& w : s.weights) {
      w = std::max(w, 0.0);
      sum += w;
    }
    for (double& w : s.weights) w /= sum;
    s.beta = std::max(s.beta, 1e-300);
    return s;
  };

  require(std::isfinite(loglik(spec)), "fit_gsm: starting values have zero likelihood");
  // squared extrapolation over EM pairs; the accelerated candidate is kept
  // only when it improves the likelihood, so the trace stays monotone
  double ll = -std::numeric_limits<double>::infinity();
  const int max_cycles = 5000;
  int it = 0;
  bool done = false;
  for (; it < max_cycles; ++it) {
    double ll0 = 0.0, ll1 = 0.0;
    GsmSpec s1 = em_step(spec, ll0);
    GsmSpec s2 = em_step(s1, ll1);
    if (fit.em_trace.empty()) fit.em_trace.push_back(ll0);
    fit.em_trace.push_back(ll1);
    double rn = 0.0, vn = 0.0;
    GsmSpec acc = s2;
    auto comp = [&](const GsmSpec& s, std::size_t j) {
      return j < K ? s.weights[j] : s.beta;
    };
    std::vector<double> r(K + 1), v(K + 1);
    for (std::size_t j = 0; j <= K; ++j) {
      r[j] = comp(s1, j) - comp(spec, j);
      v[j] = comp(s2, j) - comp(s1, j) - r[j];
      rn += r[j] * r[j];
      vn += v[j] * v[j];
    }
    double ll2 = loglik(s2);
    double ll_next = ll2;
    GsmSpec next = s2;
    if (vn > 0.0) {
      double alpha = -std::sqrt(rn / vn);
      GsmSpec cand = spec;
      for (std::size_t j = 0; j < K; ++j)
        cand.weights[j] = comp(spec, j) - 2.0 * alpha * r[j] + alpha * alpha * v[j];
      cand.beta = comp(spec, K) - 2.0 * alpha * r[K] + alpha * alpha * v[K];
      cand = project(cand);
      double llc = loglik(cand);
      if (std::isfinite(llc) && llc > ll2) {
        next = cand;
        ll_next = llc;
      }
    }
    fit.em_trace.push_back(ll_next);
    spec = next;
    if (std::isfinite(ll) && std::fabs(ll_next - ll) < 1e-8 * (1.0 + std::fabs(ll_next))) {
      ll = ll_next;
      ++it;
      done = true;
      break;
    }
    ll = ll_next;
  }
  if (!done && it >= max_cycles)
    throw convergence_error("fit_gsm: em did not converge", spec.weights);
  fit.iterations = it;
  fit.estimate = spec;

  fit.measures.log_likelihood = ll;
  auto ic = information_criteria(ll, static_cast<int>(K) + 1, static_cast<double>(n));
  fit.measures.aic = ic.aic;
  fit.measures.caic = ic.caic;
  fit.measures.bic = ic.bic;
  fit.measures.hqic = ic.hqic;
  auto edf = edf_statistics(data, [&](double x) { return gsm_cdf(spec, x); });
  fit.measures.ad = edf.ad;
  fit.measures.cvm = edf.cvm;
  fit.measures.ks = edf.ks;
  if (edf.clamped) fit.measures.diagnostics.push_back("edf: boundary u-values clamped");
  return fit;
}

}  // namespace difit
