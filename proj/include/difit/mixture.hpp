#pragma once

// Finite mixtures: density/cdf/quantile/sampling for a K-component mixture
// and EM fitting on individual data (13 families) and grouped data (gamma,
// log-normal, skew-normal, weibull). Mixture components are two-parameter
// (three for skew-normal); locations live only in the single-family fits.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "difit/common.hpp"
#include "difit/distributions.hpp"
#include "difit/gof.hpp"
#include "difit/grouped_data.hpp"
#include "difit/optim.hpp"
#include "difit/rng.hpp"
#include "difit/roots.hpp"
#include "difit/special.hpp"
#include "difit/stats.hpp"

namespace difit {

struct MixtureSpec {
  FamilyTag family = FamilyTag::weibull;
  std::vector<double> weights;
  std::vector<ParamVector> components;

  std::size_t component_count() const { return weights.size(); }

  void validate() const {
    require(!weights.empty() && weights.size() == components.size(),
            "mixture: weights and components must be nonempty and equal length");
    double sum = 0.0;
    for (double w : weights) {
      require(w >= 0.0, "mixture: weights must be nonnegative");
      sum += w;
    }
    require(std::fabs(sum - 1.0) < 1e-9, "mixture: weights must sum to one");
    for (const auto& c : components) validate_params(family, c);
  }
};

inline double mixture_pdf(const MixtureSpec& s, double x) {
  s.validate();
  double g = 0.0;
  for (std::size_t k = 0; k < s.component_count(); ++k)
    g += s.weights[k] * pdf(s.family, s.components[k], x);
  return g;
}

inline double mixture_cdf(const MixtureSpec& s, double x) {
  s.validate();
  double g = 0.0;
  for (std::size_t k = 0; k < s.component_count(); ++k)
    g += s.weights[k] * cdf(s.family, s.components[k], x);
  return g;
}

inline double mixture_quantile(const MixtureSpec& s, double prob) {
  s.validate();
  require(prob >= 0.0 && prob <= 1.0, "mixture quantile: prob must be in [0, 1]");
  // bracket by the extreme component quantiles, then invert the cdf
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < s.component_count(); ++k) {
    if (s.weights[k] <= 0.0) continue;
    lo = std::min(lo, quantile(s.family, s.components[k], prob));
    hi = std::max(hi, quantile(s.family, s.components[k], prob));
  }
  if (prob == 0.0 || prob == 1.0 || lo == hi) return prob == 1.0 ? hi : lo;
  if (hi - lo < 1e-300) return lo;
  auto f = [&](double x) {
    double g = 0.0;
    for (std::size_t k = 0; k < s.component_count(); ++k)
      g += s.weights[k] * cdf(s.family, s.components[k], x);
    return g - prob;
  };
  double flo = f(lo), fhi = f(hi);
  if (flo >= 0.0) return lo;
  if (fhi <= 0.0) return hi;
  return roots::solve_bracketed(f, lo, hi, 1e-13);
}

/// One selector uniform per draw, then the chosen component's own draws.
inline Sample mixture_sample(const MixtureSpec& s, std::size_t n, RngStream& rng) {
  s.validate();
  Sample out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform(), acc = 0.0;
    std::size_t k = s.component_count() - 1;
    for (std::size_t j = 0; j < s.component_count(); ++j) {
      acc += s.weights[j];
      if (u <= acc) {
        k = j;
        break;
      }
    }
    out.push_back(sample(s.family, s.components[k], 1, rng)[0]);
  }
  return out;
}

struct MixtureFit {
  MixtureSpec estimate;
  GofBlock measures;
  std::vector<int> cluster;  // 1-based labels; empty for grouped fits
  int iterations = 0;
  std::vector<double> em_trace;
};

namespace mixture_detail {

inline std::size_t component_param_count(FamilyTag f) {
  return f == FamilyTag::skew_normal ? 3 : 2;
}

inline void check_mixture_family(FamilyTag f) {
  require(f != FamilyTag::jsb, "fit_mixture: jsb mixtures are not supported");
}

inline void check_grouped_family(FamilyTag f) {
  require(f == FamilyTag::gamma || f == FamilyTag::log_normal ||
              f == FamilyTag::skew_normal || f == FamilyTag::weibull,
          "fit_mixture_grouped: family must be gamma, log-normal, skew-normal, or weibull");
}

/// Crude moment starts for one component from a data slice.
inline ParamVector slice_starts(FamilyTag f, const Sample& slice) {
  double m = stats::mean(slice);
  double s = slice.size() > 1 ? stats::sd(slice) : 0.3 * std::fabs(m) + 0.1;
  if (s <= 0.0 || !std::isfinite(s)) s = 0.3 * std::fabs(m) + 0.1;
  switch (f) {
    case FamilyTag::weibull: {
      double cv = std::min(std::max(s / m, 0.05), 5.0);
      double a = std::pow(cv, -1.086);  // standard CV inversion approximation
      return {a, m / std::tgamma(1.0 + 1.0 / a)};
    }
    case FamilyTag::gamma:
      return {m * m / (s * s), s * s / m};
    case FamilyTag::log_normal: {
      std::vector<double> lx(slice.size());
      std::transform(slice.begin(), slice.end(), lx.begin(),
                     [](double v) { return std::log(v); });
      double sb = lx.size() > 1 ? stats::sd(lx) : 0.25;
      if (sb <= 0.0 || !std::isfinite(sb)) sb = 0.25;
      return {stats::mean(lx), sb};
    }
    case FamilyTag::birnbaum_saunders: {
      double a = std::min(std::max(s / m, 0.05), 3.0);
      return {a, m / (1.0 + 0.5 * a * a)};
    }
    case FamilyTag::ge:
      return {1.0, 1.0 / m};
    case FamilyTag::frechet:
      return {2.0, m / std::tgamma(0.5)};
    case FamilyTag::log_logistic:
      return {2.0, m};
    case FamilyTag::lomax:
      return {1.0 / m, 2.0};
    case FamilyTag::gompertz:
      return {1.0 / m, 1.0 / m};
    case FamilyTag::chen:
      return {0.5, 0.5 / std::max(1.0, std::sqrt(m))};
    case FamilyTag::burrxii:
      return {1.0 / std::max(0.2, std::log1p(m)), 2.0};
    case FamilyTag::fisher:
      return {5.0, 5.0};
    case FamilyTag::skew_normal:
      return {m, s, 1.0};
    default:
      throw domain_error("mixture: unsupported family");
  }
}

inline MixtureSpec default_starts(FamilyTag f, const Sample& data, std::size_t K) {
  auto xs = stats::sorted(data);
  MixtureSpec spec;
  spec.family = f;
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t lo = k * xs.size() / K, hi = (k + 1) * xs.size() / K;
    Sample slice(xs.begin() + lo, xs.begin() + hi);
    spec.weights.push_back(1.0 / static_cast<double>(K));
    spec.components.push_back(slice_starts(f, slice));
  }
  return spec;
}

/// (omega..., alpha..., beta...[, lambda...]) -> spec
inline MixtureSpec unpack_starts(FamilyTag f, std::size_t K, const ParamVector& flat) {
  std::size_t p = component_param_count(f);
  require(flat.size() == K * (p + 1),
          "mixture starts: expected " + std::to_string(K * (p + 1)) + " values");
  MixtureSpec spec;
  spec.family = f;
  double sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) sum += flat[k];
  for (std::size_t k = 0; k < K; ++k) {
    spec.weights.push_back(flat[k] / sum);
    ParamVector c;
    for (std::size_t j = 0; j < p; ++j) c.push_back(flat[K * (1 + j) + k]);
    spec.components.push_back(c);
  }
  return spec;
}

inline bool component_ok(FamilyTag f, const ParamVector& c) {
  try {
    validate_params(f, c);
  } catch (const domain_error&) {
    return false;
  }
  return true;
}

/// Responsibility-weighted component ML update (one GEM step): closed form
/// for log-normal and gamma, warm-started simplex otherwise. `xs`/`w` are
/// observation nodes with nonnegative weights.
inline ParamVector weighted_component_ml(FamilyTag f, const std::vector<double>& xs,
                                         const std::vector<double>& w,
                                         const ParamVector& current) {
  double wsum = 0.0;
  for (double v : w) wsum += v;
  if (wsum <= 0.0) return current;
  if (f == FamilyTag::log_normal) {
    double m = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) m += w[i] * std::log(xs[i]);
    m /= wsum;
    double v = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double d = std::log(xs[i]) - m;
      v += w[i] * d * d;
    }
    v /= wsum;
    return {m, std::sqrt(std::max(v, 1e-300))};
  }
  if (f == FamilyTag::weibull) {
    // weighted shape profile, scale in closed form
    double xmax = 0.0, mlx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (w[i] > 0.0) xmax = std::max(xmax, xs[i]);
      mlx += w[i] * std::log(xs[i]);
    }
    mlx /= wsum;
    auto g = [&](double a) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (w[i] == 0.0) continue;
        double t = w[i] * std::pow(xs[i] / xmax, a);
        num += t * std::log(xs[i]);
        den += t;
      }
      return num / den - 1.0 / a - mlx;
    };
    double a;
    try {
      a = roots::solve_expanding(g, std::clamp(current[0], 1e-2, 1e3), 0.5, 1e-3, 1e4, 1e-13);
    } catch (const domain_error&) {
      return current;
    }
    double mb = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) mb += w[i] * std::pow(xs[i] / xmax, a);
    return {a, xmax * std::pow(mb / wsum, 1.0 / a)};
  }
  if (f == FamilyTag::gamma) {
    double mx = 0.0, mlx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += w[i] * xs[i];
      mlx += w[i] * std::log(xs[i]);
    }
    mx /= wsum;
    mlx /= wsum;
    double c = std::log(mx) - mlx;  // >= 0 by Jensen
    if (c <= 0.0) return current;
    auto g = [&](double a) { return std::log(a) - special::digamma(a) - c; };
    double a = roots::solve_expanding(g, std::max(current[0], 1e-2), 0.5, 1e-4, 1e6, 1e-12);
    return {a, mx / a};
  }
  auto obj = [&](const std::vector<double>& c) {
    if (!component_ok(f, c)) return std::numeric_limits<double>::infinity();
    double q = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (w[i] == 0.0) continue;
      double lp = log_pdf(f, c, xs[i]);
      if (!std::isfinite(lp)) return std::numeric_limits<double>::infinity();
      q -= w[i] * lp;
    }
    return q;
  };
  // generalized EM: a partial inner maximization preserves monotonicity, so
  // the simplex is run with loose tolerances and few iterations
  auto res = optim::nelder_mead(obj, current, 1e-10, 1e-8, 250);
  return std::isfinite(res.fmin) && res.fmin <= obj(current) ? res.x : current;
}

inline double component_median(FamilyTag f, const ParamVector& c) {
  return quantile(f, c, 0.5);
}

/// Sort components by median ascending; remap labels accordingly.
inline void canonical_order(MixtureSpec& spec, std::vector<int>* labels) {
  std::size_t K = spec.component_count();
  std::vector<std::size_t> idx(K);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return component_median(spec.family, spec.components[a]) <
           component_median(spec.family, spec.components[b]);
  });
  MixtureSpec out = spec;
  std::vector<int> remap(K);
  for (std::size_t r = 0; r < K; ++r) {
    out.weights[r] = spec.weights[idx[r]];
    out.components[r] = spec.components[idx[r]];
    remap[idx[r]] = static_cast<int>(r) + 1;
  }
  spec = out;
  if (labels)
    for (int& l : *labels) l = remap[static_cast<std::size_t>(l - 1)];
}

struct Collapse {};

/// Gauss-Legendre nodes/weights on (0, 1), shared with the grouped EM.
inline const std::vector<std::pair<double, double>>& gl16();

}  // namespace mixture_detail

inline MixtureFit fit_mixture(const Sample& data, FamilyTag family, std::size_t K,
                              std::optional<ParamVector> starts = std::nullopt) {
  namespace md = mixture_detail;
  md::check_mixture_family(family);
  require(K >= 1, "fit_mixture: K must be >= 1");
  require(data.size() >= 5 * K, "fit_mixture: need at least 5K observations");
  for (double v : data)
    require(family == FamilyTag::skew_normal || v > 0.0,
            "fit_mixture: data must be positive for this family");

  const std::size_t n = data.size();
  const std::size_t p = md::component_param_count(family);
  MixtureSpec base = starts ? md::unpack_starts(family, K, *starts)
                            : md::default_starts(family, data, K);
  base.validate();

  MixtureFit fit;
  std::string last_error;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    MixtureSpec spec = base;
    if (attempt > 0) {
      // deterministic perturbation of the starting components
      RngStream rng(1000 + static_cast<std::uint64_t>(attempt));
      for (auto& c : spec.components)
        for (auto& v : c) v *= std::exp(0.25 * (rng.uniform() - 0.5));
      if (!std::all_of(spec.components.begin(), spec.components.end(),
                       [&](const ParamVector& c) { return md::component_ok(family, c); }))
        continue;
    }
    try {
      std::vector<std::vector<double>> tau(K, std::vector<double>(n));
      auto loglik = [&](const MixtureSpec& s) {
        double ll = 0.0;
        for (double x : data) {
          double g = 0.0;
          for (std::size_t k = 0; k < K; ++k)
            g += s.weights[k] * pdf(family, s.components[k], x);
          if (g <= 0.0) return -std::numeric_limits<double>::infinity();
          ll += std::log(g);
        }
        return ll;
      };
      double ll = loglik(spec);
      if (!std::isfinite(ll)) throw md::Collapse{};
      fit.em_trace.assign(1, ll);
      int it = 0;
      for (; it < 5000; ++it) {
        // E-step
        for (std::size_t i = 0; i < n; ++i) {
          double g = 0.0;
          for (std::size_t k = 0; k < K; ++k) {
            tau[k][i] = spec.weights[k] * pdf(family, spec.components[k], data[i]);
            g += tau[k][i];
          }
          if (g <= 0.0) throw md::Collapse{};
          for (std::size_t k = 0; k < K; ++k) tau[k][i] /= g;
        }
        // M-step
        for (std::size_t k = 0; k < K; ++k) {
          double wk = 0.0;
          for (std::size_t i = 0; i < n; ++i) wk += tau[k][i];
          spec.weights[k] = wk / static_cast<double>(n);
          if (spec.weights[k] < 1e-6) throw md::Collapse{};
          spec.components[k] =
              md::weighted_component_ml(family, data, tau[k], spec.components[k]);
          for (double v : spec.components[k])
            if (!std::isfinite(v)) throw md::Collapse{};
          if (family != FamilyTag::skew_normal && spec.components[k][1] < 1e-10)
            throw md::Collapse{};
        }
        double ll_new = loglik(spec);
        if (!std::isfinite(ll_new)) throw md::Collapse{};
        fit.em_trace.push_back(ll_new);
        if (std::fabs(ll_new - ll) < 1e-8) {
          ll = ll_new;
          ++it;
          break;
        }
        ll = ll_new;
      }
      fit.iterations = it;
      fit.estimate = spec;

      fit.cluster.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double bv = -1.0;
        for (std::size_t k = 0; k < K; ++k) {
          double v = spec.weights[k] * pdf(family, spec.components[k], data[i]);
          if (v > bv) {
            bv = v;
            best = k;
          }
        }
        fit.cluster[i] = static_cast<int>(best) + 1;
      }
      md::canonical_order(fit.estimate, &fit.cluster);

      fit.measures.log_likelihood = ll;
      int kfree = static_cast<int>(K * p + K - 1);
      auto ic = information_criteria(ll, kfree, static_cast<double>(n));
      fit.measures.aic = ic.aic;
      fit.measures.caic = ic.caic;
      fit.measures.bic = ic.bic;
      fit.measures.hqic = ic.hqic;
      auto edf = edf_statistics(data, [&](double x) { return mixture_cdf(fit.estimate, x); });
      fit.measures.ad = edf.ad;
      fit.measures.cvm = edf.cvm;
      fit.measures.ks = edf.ks;
      if (edf.clamped) fit.measures.diagnostics.push_back("edf: boundary u-values clamped");
      return fit;
    } catch (const md::Collapse&) {
      last_error = "component collapse";
      continue;
    }
  }
  throw convergence_error("fit_mixture: " + last_error + " after 5 restarts", {});
}

namespace mixture_detail {

inline const std::vector<std::pair<double, double>>& gl16() {
  static const std::vector<std::pair<double, double>> nw = [] {
    const double x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                         0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                         0.9445750230732326, 0.9894009349916499};
    const double w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                         0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                         0.0622535239386479, 0.0271524594117541};
    std::vector<std::pair<double, double>> out;
    for (int i = 7; i >= 0; --i) out.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
    for (int i = 0; i < 8; ++i) out.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
    return out;
  }();
  return nw;
}

/// Quadrature nodes for one class; handles unbounded first/last classes.
inline void class_nodes(FamilyTag f, const GroupedSample& g, std::size_t i,
                        std::vector<double>& xs, std::vector<double>& jac) {
  xs.clear();
  jac.clear();
  const std::size_t m = g.class_count();
  double support_lo = (f == FamilyTag::skew_normal) ? -std::numeric_limits<double>::infinity()
                                                    : 0.0;
  double lo = (i == 0) ? support_lo : g.boundaries[i];
  double hi = (i == m - 1) ? std::numeric_limits<double>::infinity() : g.boundaries[i + 1];
  if (std::isinf(lo) && std::isinf(hi)) {
    lo = g.boundaries.front() - 1.0;
    hi = g.boundaries.back() + 1.0;
  }
  for (const auto& [t, w] : gl16()) {
    if (std::isinf(hi)) {
      double b0 = std::isinf(lo) ? g.boundaries[i] : lo;
      xs.push_back(b0 + t / (1.0 - t));
      jac.push_back(w / ((1.0 - t) * (1.0 - t)));
    } else if (std::isinf(lo)) {
      xs.push_back(hi - t / (1.0 - t));
      jac.push_back(w / ((1.0 - t) * (1.0 - t)));
    } else {
      xs.push_back(lo + t * (hi - lo));
      jac.push_back(w * (hi - lo));
    }
  }
}

}  // namespace mixture_detail

inline MixtureFit fit_mixture_grouped(const GroupedSample& g, FamilyTag family, std::size_t K,
                                      std::optional<ParamVector> starts = std::nullopt) {
  namespace md = mixture_detail;
  g.validate();
  md::check_grouped_family(family);
  require(K >= 1, "fit_mixture_grouped: K must be >= 1");
  std::size_t nonempty = 0;
  for (double f : g.frequencies)
    if (f > 0.0) ++nonempty;
  require(nonempty >= K, "fit_mixture_grouped: need at least K nonempty classes");

  const std::size_t m = g.class_count();
  const std::size_t p = md::component_param_count(family);
  const double n = g.total();

  MixtureSpec base;
  if (starts) {
    base = md::unpack_starts(family, K, *starts);
  } else {
    Sample pseudo;
    for (std::size_t i = 0; i < m; ++i) {
      long c = std::lround(g.frequencies[i]);
      for (long j = 0; j < c; ++j) pseudo.push_back(g.midpoint(i));
    }
    base = md::default_starts(family, pseudo, K);
  }
  base.validate();

  // folded class probability of one component
  auto comp_prob = [&](const ParamVector& c, std::size_t i) {
    double lo = (i == 0) ? 0.0 : cdf(family, c, g.boundaries[i]);
    double hi = (i == m - 1) ? 1.0 : cdf(family, c, g.boundaries[i + 1]);
    return hi - lo;
  };
  auto kernel = [&](const MixtureSpec& s) {
    double ll = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (g.frequencies[i] == 0.0) continue;
      double pi = 0.0;
      for (std::size_t k = 0; k < K; ++k) pi += s.weights[k] * comp_prob(s.components[k], i);
      if (pi <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += g.frequencies[i] * std::log(pi);
    }
    return ll;
  };

  MixtureFit fit;
  std::string last_error;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    MixtureSpec spec = base;
    if (attempt > 0) {
      RngStream rng(2000 + static_cast<std::uint64_t>(attempt));
      for (auto& c : spec.components)
        for (auto& v : c) v *= std::exp(0.25 * (rng.uniform() - 0.5));
      if (!std::all_of(spec.components.begin(), spec.components.end(),
                       [&](const ParamVector& c) { return md::component_ok(family, c); }))
        continue;
    }
    try {
      double ll = kernel(spec);
      if (!std::isfinite(ll)) throw md::Collapse{};
      fit.em_trace.assign(1, ll);
      int it = 0;
      std::vector<double> xs, jac;
      for (; it < 5000; ++it) {
        // class-level responsibilities
        std::vector<std::vector<double>> tau(K, std::vector<double>(m, 0.0));
        std::vector<std::vector<double>> pk(K, std::vector<double>(m));
        for (std::size_t i = 0; i < m; ++i) {
          double tot = 0.0;
          for (std::size_t k = 0; k < K; ++k) {
            pk[k][i] = comp_prob(spec.components[k], i);
            tau[k][i] = spec.weights[k] * pk[k][i];
            tot += tau[k][i];
          }
          if (tot <= 0.0 && g.frequencies[i] > 0.0) throw md::Collapse{};
          if (tot > 0.0)
            for (std::size_t k = 0; k < K; ++k) tau[k][i] /= tot;
        }
        // M-step: node expansion of the within-class conditional densities
        for (std::size_t k = 0; k < K; ++k) {
          double wk = 0.0;
          for (std::size_t i = 0; i < m; ++i) wk += g.frequencies[i] * tau[k][i];
          spec.weights[k] = wk / n;
          if (spec.weights[k] < 1e-6) throw md::Collapse{};
          std::vector<double> nx, nw;
          for (std::size_t i = 0; i < m; ++i) {
            if (g.frequencies[i] == 0.0 || tau[k][i] == 0.0 || pk[k][i] <= 0.0) continue;
            md::class_nodes(family, g, i, xs, jac);
            double scale = g.frequencies[i] * tau[k][i] / pk[k][i];
            for (std::size_t q = 0; q < xs.size(); ++q) {
              double d = pdf(family, spec.components[k], xs[q]);
              if (d <= 0.0) continue;
              nx.push_back(xs[q]);
              nw.push_back(scale * jac[q] * d);
            }
          }
          if (nx.empty()) throw md::Collapse{};
          spec.components[k] =
              md::weighted_component_ml(family, nx, nw, spec.components[k]);
          for (double v : spec.components[k])
            if (!std::isfinite(v)) throw md::Collapse{};
        }
        double ll_new = kernel(spec);
        if (!std::isfinite(ll_new)) throw md::Collapse{};
        if (ll_new < ll - 1e-10) break;  // quadrature noise floor: stop at current theta
        fit.em_trace.push_back(ll_new);
        if (std::fabs(ll_new - ll) < 1e-8) {
          ll = ll_new;
          ++it;
          break;
        }
        ll = ll_new;
      }
      fit.iterations = it;
      fit.estimate = spec;
      md::canonical_order(fit.estimate, nullptr);

      double final_kernel = kernel(fit.estimate);
      fit.measures.log_likelihood = final_kernel + log_multinomial_coefficient(g);
      int kfree = static_cast<int>(K * p + K - 1);
      auto ic = information_criteria(fit.measures.log_likelihood, kfree, n);
      fit.measures.aic = ic.aic;
      fit.measures.caic = ic.caic;
      fit.measures.bic = ic.bic;
      fit.measures.hqic = ic.hqic;
      auto edf = edf_statistics_grouped(
          g, [&](double x) { return mixture_cdf(fit.estimate, x); });
      fit.measures.ad = edf.ad;
      fit.measures.cvm = edf.cvm;
      fit.measures.ks = edf.ks;
      if (edf.clamped) fit.measures.diagnostics.push_back("edf: boundary u-values clamped");
      fit.measures.chi_square =
          grouped_chi_square(g, [&](double x) { return mixture_cdf(fit.estimate, x); }).value;
      return fit;
    } catch (const md::Collapse&) {
      last_error = "component collapse";
      continue;
    }
  }
  throw convergence_error("fit_mixture_grouped: " + last_error + " after 5 restarts", {});
}

}  // namespace difit
