#pragma once

// Two- and three-parameter Weibull estimators. Each method code maps to the
// standard definition from its originating literature; see the per-method
// notes below.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "difit/common.hpp"
#include "difit/distributions.hpp"
#include "difit/gof.hpp"
#include "difit/optim.hpp"
#include "difit/roots.hpp"
#include "difit/stats.hpp"

namespace difit {

enum class WeibullMethod {
  // two-parameter
  greg1, greg2, lm, ml, mlm, moment, pm, rank, reg, ustat, wml, wreg,
  // three-parameter
  mle, mm1, mm2, mm3, mml1, mml2, mml3, mml4, mps, tlm,
};

inline const char* weibull_method_name(WeibullMethod m) {
  switch (m) {
    case WeibullMethod::greg1: return "greg1";
    case WeibullMethod::greg2: return "greg2";
    case WeibullMethod::lm: return "lm";
    case WeibullMethod::ml: return "ml";
    case WeibullMethod::mlm: return "mlm";
    case WeibullMethod::moment: return "moment";
    case WeibullMethod::pm: return "pm";
    case WeibullMethod::rank: return "rank";
    case WeibullMethod::reg: return "reg";
    case WeibullMethod::ustat: return "ustat";
    case WeibullMethod::wml: return "wml";
    case WeibullMethod::wreg: return "wreg";
    case WeibullMethod::mle: return "mle";
    case WeibullMethod::mm1: return "mm1";
    case WeibullMethod::mm2: return "mm2";
    case WeibullMethod::mm3: return "mm3";
    case WeibullMethod::mml1: return "mml1";
    case WeibullMethod::mml2: return "mml2";
    case WeibullMethod::mml3: return "mml3";
    case WeibullMethod::mml4: return "mml4";
    case WeibullMethod::mps: return "mps";
    case WeibullMethod::tlm: return "tlm";
  }
  return "?";
}

inline WeibullMethod weibull_method_from_string(const std::string& s) {
  for (WeibullMethod m :
       {WeibullMethod::greg1, WeibullMethod::greg2, WeibullMethod::lm, WeibullMethod::ml,
        WeibullMethod::mlm, WeibullMethod::moment, WeibullMethod::pm, WeibullMethod::rank,
        WeibullMethod::reg, WeibullMethod::ustat, WeibullMethod::wml, WeibullMethod::wreg,
        WeibullMethod::mle, WeibullMethod::mm1, WeibullMethod::mm2, WeibullMethod::mm3,
        WeibullMethod::mml1, WeibullMethod::mml2, WeibullMethod::mml3, WeibullMethod::mml4,
        WeibullMethod::mps, WeibullMethod::tlm})
    if (s == weibull_method_name(m)) return m;
  throw domain_error("unknown weibull method: " + s);
}

/// wml is valid for both parameter counts; everything else belongs to one.
inline bool weibull_method_valid(WeibullMethod m, bool location) {
  if (m == WeibullMethod::wml) return true;
  bool two = m == WeibullMethod::greg1 || m == WeibullMethod::greg2 || m == WeibullMethod::lm ||
             m == WeibullMethod::ml || m == WeibullMethod::mlm || m == WeibullMethod::moment ||
             m == WeibullMethod::pm || m == WeibullMethod::rank || m == WeibullMethod::reg ||
             m == WeibullMethod::ustat || m == WeibullMethod::wreg;
  return location ? !two : two;
}

struct WeibullFit {
  ParamVector estimate;  // (alpha, beta) or (alpha, beta, mu)
  GofBlock measures;
  WeibullMethod method;
  bool converged = true;
  int iterations = 0;
};

namespace weibull_detail {

inline double loglik(const Sample& x, double a, double b, double mu) {
  if (a <= 0.0 || b <= 0.0) return -std::numeric_limits<double>::infinity();
  double ll = 0.0;
  double la = std::log(a), lb = std::log(b);
  for (double v : x) {
    double z = (v - mu) / b;
    if (z <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += la - lb + (a - 1.0) * std::log(z) - std::pow(z, a);
  }
  return ll;
}

/// Two-parameter ML via the shape profile equation
///   sum x^a ln x / sum x^a - 1/a - mean(ln x) = 0, then beta closed form.
inline std::pair<double, double> ml2(const Sample& x) {
  double lbar = 0.0;
  for (double v : x) lbar += std::log(v);
  lbar /= static_cast<double>(x.size());
  auto g = [&](double a) {
    double num = 0.0, den = 0.0;
    // scale x^a by max to avoid overflow at large a
    double xmax = stats::min(x);
    for (double v : x) xmax = std::max(xmax, v);
    for (double v : x) {
      double w = std::pow(v / xmax, a);
      num += w * std::log(v);
      den += w;
    }
    return num / den - 1.0 / a - lbar;
  };
  double a = roots::solve_expanding(g, 1.0, 0.5, 1e-3, 1e4, 1e-13);
  double mb = 0.0;
  double xmax = 0.0;
  for (double v : x) xmax = std::max(xmax, v);
  for (double v : x) mb += std::pow(v / xmax, a);
  double b = xmax * std::pow(mb / static_cast<double>(x.size()), 1.0 / a);
  return {a, b};
}

inline double gamma1(double a) { return std::tgamma(1.0 + 1.0 / a); }
inline double gamma2(double a) { return std::tgamma(1.0 + 2.0 / a); }

/// Median-rank plotting positions (i - 0.375)/(n + 0.25).
inline std::vector<double> plotting_positions(std::size_t n) {
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i)
    f[i] = (static_cast<double>(i + 1) - 0.375) / (static_cast<double>(n) + 0.25);
  return f;
}

struct LinFit {
  double slope, intercept;
};

inline LinFit weighted_ls(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& w) {
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += w[i];
    sx += w[i] * xs[i];
    sy += w[i] * ys[i];
    sxx += w[i] * xs[i] * xs[i];
    sxy += w[i] * xs[i] * ys[i];
  }
  double mx = sx / sw, my = sy / sw;
  double slope = (sxy - sw * mx * my) / (sxx - sw * mx * mx);
  return {slope, my - slope * mx};
}

/// Regression-type estimators on ln(-ln(1-F_i)) = a ln x_i - a ln b.
/// reg/wreg regress y on ln x; greg1/greg2 regress ln x on y (the
/// generalized, error-in-the-regressor orientation). The weighted variants
/// use w_i = ((1-F_i) ln(1-F_i))^2, the inverse asymptotic variance of y_i.
inline std::pair<double, double> regression2(const Sample& x, bool weighted, bool inverted) {
  auto xs = stats::sorted(x);
  auto F = plotting_positions(xs.size());
  std::vector<double> lx(xs.size()), y(xs.size()), w(xs.size(), 1.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx[i] = std::log(xs[i]);
    y[i] = std::log(-std::log1p(-F[i]));
    if (weighted) {
      double t = (1.0 - F[i]) * std::log1p(-F[i]);
      w[i] = t * t;
    }
  }
  if (!inverted) {
    LinFit fit = weighted_ls(lx, y, w);
    double a = fit.slope;
    return {a, std::exp(-fit.intercept / a)};
  }
  LinFit fit = weighted_ls(y, lx, w);
  double a = 1.0 / fit.slope;
  return {a, std::exp(fit.intercept)};
}

/// L-moment estimator (probability weighted moments b0, b1).
inline std::pair<double, double> lmoment2(const Sample& x) {
  auto xs = stats::sorted(x);
  double n = static_cast<double>(xs.size());
  double b0 = 0.0, b1 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    b0 += xs[i];
    b1 += xs[i] * static_cast<double>(i) / (n - 1.0);
  }
  b0 /= n;
  b1 /= n;
  double l1 = b0, l2 = 2.0 * b1 - b0;
  double t = l2 / l1;  // 1 - 2^(-1/a)
  require(t > 0.0 && t < 1.0, "lm: L-moment ratio out of range");
  double a = -std::log(2.0) / std::log1p(-t);
  return {a, l1 / gamma1(a)};
}

/// Logarithmic-moment estimator: Var(ln X) = pi^2/(6 a^2),
/// E(ln X) = ln b - gamma_E / a.
inline std::pair<double, double> logmoment2(const Sample& x) {
  std::vector<double> lx(x.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
  double a = special::pi / (stats::sd(lx) * std::sqrt(6.0));
  double b = std::exp(stats::mean(lx) + special::euler_gamma / a);
  return {a, b};
}

/// Method of moments: match the coefficient of variation, then the mean.
inline std::pair<double, double> moment2(const Sample& x) {
  double cv = stats::sd(x) / stats::mean(x);
  auto g = [&](double a) {
    double g1 = gamma1(a), g2 = gamma2(a);
    return std::sqrt(std::max(g2 - g1 * g1, 0.0)) / g1 - cv;
  };
  double a = roots::solve_expanding(g, 1.0, 0.5, 0.02, 1e4, 1e-12);
  return {a, stats::mean(x) / gamma1(a)};
}

/// Percentile estimator at p = 0.25 and 0.75 (type-7 sample quantiles).
inline std::pair<double, double> percentile2(const Sample& x) {
  auto xs = stats::sorted(x);
  double q1 = stats::quantile_type7(xs, 0.25);
  double q3 = stats::quantile_type7(xs, 0.75);
  require(q1 > 0.0 && q3 > q1, "pm: degenerate sample quantiles");
  double k1 = -std::log1p(-0.25), k3 = -std::log1p(-0.75);
  double a = std::log(k3 / k1) / std::log(q3 / q1);
  double b = q1 / std::pow(k1, 1.0 / a);
  return {a, b};
}

/// Rank-correlation (probability-plot correlation) estimator: the shape
/// maximizes the correlation between order statistics and unit-scale Weibull
/// quantiles; the scale follows by through-origin least squares.
inline std::pair<double, double> rank2(const Sample& x) {
  auto xs = stats::sorted(x);
  auto F = plotting_positions(xs.size());
  auto corr_at = [&](double a) {
    std::vector<double> q(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) q[i] = std::pow(-std::log1p(-F[i]), 1.0 / a);
    double mx = stats::mean(xs), mq = stats::mean(q);
    double sxq = 0.0, sxx = 0.0, sqq = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxq += (xs[i] - mx) * (q[i] - mq);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sqq += (q[i] - mq) * (q[i] - mq);
    }
    return sxq / std::sqrt(sxx * sqq);
  };
  // golden-section maximization over ln(a)
  double lo = -6.0, hi = 6.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = corr_at(std::exp(c)), fd = corr_at(std::exp(d));
  for (int it = 0; it < 120; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = corr_at(std::exp(c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = corr_at(std::exp(d));
    }
  }
  double a = std::exp(0.5 * (lo + hi));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double q = std::pow(-std::log1p(-F[i]), 1.0 / a);
    num += q * xs[i];
    den += q * q;
  }
  return {a, num / den};
}

/// U-statistic estimator: for Weibull, E|ln Xi - ln Xj| = 2 ln 2 / a.
inline std::pair<double, double> ustat2(const Sample& x) {
  std::vector<double> lx(x.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
  std::sort(lx.begin(), lx.end());
  double n = static_cast<double>(lx.size());
  // sum over pairs of |di - dj| via the sorted-order identity
  double s = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j)
    s += (2.0 * static_cast<double>(j + 1) - 1.0 - n) * lx[j];
  double u = s / (n * (n - 1.0) / 2.0);
  double a = 2.0 * std::log(2.0) / u;
  double b = std::exp(stats::mean(lx) + special::euler_gamma / a);
  return {a, b};
}

/// Weighted-likelihood (bias-reduced) ML: the ML shape is shrunk by the
/// small-sample factor (n-2)/(n-0.68); the scale is re-solved from the ML
/// scale equation at the corrected shape.
inline std::pair<double, double> wml2(const Sample& x) {
  auto [a_ml, b_ml] = ml2(x);
  (void)b_ml;
  double n = static_cast<double>(x.size());
  double a = a_ml * (n - 2.0) / (n - 0.68);
  double mb = 0.0;
  for (double v : x) mb += std::pow(v, a);
  double b = std::pow(mb / n, 1.0 / a);
  return {a, b};
}

// ---- three-parameter machinery ----

/// Default starts: mu0 = 0.9 min(x), then the 2-parameter ML fit of x - mu0.
inline ParamVector default_starts3(const Sample& x) {
  double mu0 = 0.9 * stats::min(x);
  Sample shifted(x.size());
  std::transform(x.begin(), x.end(), shifted.begin(), [&](double v) { return v - mu0; });
  auto [a0, b0] = ml2(shifted);
  return {a0, b0, mu0};
}

/// Profile log-likelihood over mu: inner (alpha, beta) solved exactly by the
/// two-parameter ML profile, outer 1-D golden-section on mu < min(x).
inline std::tuple<double, double, double> mle3(const Sample& x) {
  double x1 = stats::min(x);
  double range = *std::max_element(x.begin(), x.end()) - x1;
  auto profile = [&](double t) {
    double mu = x1 - std::exp(t);
    Sample shifted(x.size());
    std::transform(x.begin(), x.end(), shifted.begin(), [&](double v) { return v - mu; });
    auto [a, b] = ml2(shifted);
    return loglik(x, a, b, mu);
  };
  double lo = std::log(1e-8 * range), hi = std::log(50.0 * range);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = profile(c), fd = profile(d);
  for (int it = 0; it < 200; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = profile(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = profile(d);
    }
  }
  double mu = x1 - std::exp(0.5 * (lo + hi));
  Sample shifted(x.size());
  std::transform(x.begin(), x.end(), shifted.begin(), [&](double v) { return v - mu; });
  auto [a, b] = ml2(shifted);
  return {a, b, mu};
}

/// Mean log spacing objective with F(x_(0)) = 0, F(x_(n+1)) = 1; tied
/// neighbors contribute log pdf instead of a zero spacing.
inline double mps_objective(const std::vector<double>& xs, double a, double b, double mu) {
  if (a <= 0.0 || b <= 0.0 || mu >= xs.front())
    return -std::numeric_limits<double>::infinity();
  ParamVector p{a, b, mu};
  double prev = 0.0, total = 0.0;
  for (std::size_t i = 0; i <= xs.size(); ++i) {
    double cur = (i == xs.size()) ? 1.0 : cdf(FamilyTag::weibull, p, xs[i]);
    if (i > 0 && i < xs.size() && xs[i] == xs[i - 1]) {
      total += log_pdf(FamilyTag::weibull, p, xs[i]);
      continue;
    }
    double sp = cur - prev;
    if (sp <= 0.0) return -std::numeric_limits<double>::infinity();
    total += std::log(sp);
    prev = cur;
  }
  return total / static_cast<double>(xs.size() + 1);
}

inline std::tuple<double, double, double, bool, int> mps3(const Sample& x,
                                                          const ParamVector& starts) {
  auto xs = stats::sorted(x);
  auto obj = [&](const std::vector<double>& p) { return -mps_objective(xs, p[0], p[1], p[2]); };
  auto res = optim::nelder_mead(obj, starts, 1e-12, 1e-10, 2000);
  auto res2 = optim::nelder_mead(obj, res.x, 1e-12, 1e-10, 2000);  // restart polish
  if (res2.fmin <= res.fmin) res = res2;
  return {res.x[0], res.x[1], res.x[2], res.converged, res.iterations};
}

/// Expected first order statistic: E[X_(1)] = mu + b n^(-1/a) Gamma(1+1/a).
inline double expected_min(double a, double b, double mu, double n) {
  return mu + b * std::pow(n, -1.0 / a) * gamma1(a);
}

/// Scan a 1-D function over a log-spaced grid for a sign change, then solve.
inline double scan_solve(const std::function<double(double)>& g, const std::vector<double>& grid,
                         const char* what) {
  double prev_t = grid.front(), prev_v = g(prev_t);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double t = grid[i], v = g(t);
    if (prev_v == 0.0) return prev_t;
    if (std::isfinite(v) && std::isfinite(prev_v) && prev_v * v < 0.0)
      return roots::solve_bracketed(g, prev_t, t, 1e-13);
    prev_t = t;
    prev_v = v;
  }
  throw convergence_error(std::string(what) + ": no root in search range", {prev_t});
}

/// Modified-moment estimators (three variants). All match the mean and
/// variance; they differ in the third equation:
///   mm1: E[X_(1)] = x_(1)
///   mm2: F(x_(1)) = 1/(n+1)
///   mm3: third standardized moment = sample skewness (classic three-moment)
inline std::tuple<double, double, double> modified_moments3(const Sample& x, int variant) {
  double xbar = stats::mean(x), s = stats::sd(x), x1 = stats::min(x);
  double n = static_cast<double>(x.size());
  double skew = stats::skewness(x);
  auto beta_of = [&](double a) {
    double v = gamma2(a) - gamma1(a) * gamma1(a);
    return s / std::sqrt(std::max(v, 1e-300));
  };
  auto g = [&](double la) {
    double a = std::exp(la);
    double b = beta_of(a);
    double mu = xbar - b * gamma1(a);
    switch (variant) {
      case 1: return expected_min(a, b, mu, n) - x1;
      case 2: return mu + b * std::pow(-std::log1p(-1.0 / (n + 1.0)), 1.0 / a) - x1;
      default: {
        double g1 = gamma1(a), g2 = gamma2(a), g3 = std::tgamma(1.0 + 3.0 / a);
        double v = g2 - g1 * g1;
        return (g3 - 3.0 * g1 * g2 + 2.0 * g1 * g1 * g1) / std::pow(v, 1.5) - skew;
      }
    }
  };
  std::vector<double> grid;
  for (double t = std::log(0.08); t <= std::log(400.0); t += 0.05) grid.push_back(t);
  double la = scan_solve(g, grid, "modified moments");
  double a = std::exp(la), b = beta_of(a);
  return {a, b, xbar - b * gamma1(a)};
}

/// Modified ML: (alpha, beta) from the two-parameter ML profile of x - mu;
/// mu solves one auxiliary equation:
///   mml1: E[X_(1)] = x_(1)      mml2: F(x_(1)) = 1/(n+1)
///   mml3: E[X] = mean           mml4: Var[X] = s^2
inline std::tuple<double, double, double> modified_ml3(const Sample& x, int variant) {
  double x1 = stats::min(x);
  double range = *std::max_element(x.begin(), x.end()) - x1;
  double xbar = stats::mean(x), s2 = stats::variance(x);
  double n = static_cast<double>(x.size());
  auto fit_at = [&](double mu) {
    Sample shifted(x.size());
    std::transform(x.begin(), x.end(), shifted.begin(), [&](double v) { return v - mu; });
    return ml2(shifted);
  };
  auto g = [&](double t) {
    double mu = x1 - std::exp(t);
    auto [a, b] = fit_at(mu);
    switch (variant) {
      case 1: return expected_min(a, b, mu, n) - x1;
      case 2: {
        double u = -std::expm1(-std::pow((x1 - mu) / b, a));
        return u - 1.0 / (n + 1.0);
      }
      case 3: return mu + b * gamma1(a) - xbar;
      default: return b * b * (gamma2(a) - gamma1(a) * gamma1(a)) - s2;
    }
  };
  std::vector<double> grid;
  for (double t = std::log(1e-9 * range); t <= std::log(100.0 * range); t += 0.1)
    grid.push_back(t);
  double t = scan_solve(g, grid, "modified ml");
  double mu = x1 - std::exp(t);
  auto [a, b] = fit_at(mu);
  return {a, b, mu};
}

/// Trimmed L-moment (t = 1) estimator. Sample TL-moments use the standard
/// order-statistic weights; theoretical values come from closed-form scaled
/// order-statistic means.
inline std::tuple<double, double, double> tlmoment3(const Sample& x) {
  auto xs = stats::sorted(x);
  int n = static_cast<int>(xs.size());
  require(n >= 5, "tlm: need at least 5 observations");
  auto comb = [](double nn, int kk) {
    double c = 1.0;
    for (int i = 0; i < kk; ++i) c = c * (nn - i) / (i + 1);
    return c;
  };
  double l1 = 0.0, l2 = 0.0, l3 = 0.0;
  for (int i = 1; i <= n; ++i) {
    double xi = xs[i - 1];
    l1 += comb(i - 1.0, 1) * comb(n - i, 1) / comb(n, 3) * xi;
    l2 += (comb(i - 1.0, 2) * comb(n - i, 1) - comb(i - 1.0, 1) * comb(n - i, 2)) /
          comb(n, 4) * xi / 2.0;
    l3 += (comb(i - 1.0, 3) * comb(n - i, 1) - 2.0 * comb(i - 1.0, 2) * comb(n - i, 2) +
           comb(i - 1.0, 1) * comb(n - i, 3)) /
          comb(n, 5) * xi / 3.0;
  }
  // E[X_{j:m}] for the unit Weibull (mu = 0, beta = 1)
  auto ev = [&](int j, int m, double a) {
    double total = 0.0;
    for (int k = 0; k <= j - 1; ++k) {
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      total += sign * comb(j - 1.0, k) / std::pow(m - j + k + 1.0, 1.0 + 1.0 / a);
    }
    return m * comb(m - 1.0, j - 1) * gamma1(a) * total;
  };
  auto tau3 = [&](double a) {
    double lam2 = 0.5 * (ev(3, 4, a) - ev(2, 4, a));
    double lam3 = (ev(4, 5, a) - 2.0 * ev(3, 5, a) + ev(2, 5, a)) / 3.0;
    return lam3 / lam2;
  };
  double target = l3 / l2;
  auto g = [&](double la) { return tau3(std::exp(la)) - target; };
  std::vector<double> grid;
  for (double t = std::log(0.08); t <= std::log(400.0); t += 0.05) grid.push_back(t);
  double a = std::exp(scan_solve(g, grid, "tlm"));
  double b = 2.0 * l2 / (ev(3, 4, a) - ev(2, 4, a));
  double mu = l1 - b * ev(2, 3, a);
  return {a, b, mu};
}

/// Three-parameter weighted-likelihood fit: alternate the bias-reduced
/// two-parameter fit of x - mu with the first-order-statistic equation for mu.
inline std::tuple<double, double, double> wml3(const Sample& x, const ParamVector& starts) {
  double x1 = stats::min(x);
  double n = static_cast<double>(x.size());
  double mu = starts.size() == 3 ? starts[2] : 0.9 * x1;
  double a = 1.0, b = 1.0;
  for (int it = 0; it < 100; ++it) {
    Sample shifted(x.size());
    std::transform(x.begin(), x.end(), shifted.begin(), [&](double v) { return v - mu; });
    std::tie(a, b) = wml2(shifted);
    double mu_new = x1 - b * std::pow(n, -1.0 / a) * gamma1(a);
    mu_new = std::min(mu_new, x1 - 1e-10 * (1.0 + std::fabs(x1)));
    if (std::fabs(mu_new - mu) < 1e-10 * (1.0 + std::fabs(mu))) {
      mu = mu_new;
      break;
    }
    mu = 0.5 * (mu + mu_new);  // damped update
  }
  Sample shifted(x.size());
  std::transform(x.begin(), x.end(), shifted.begin(), [&](double v) { return v - mu; });
  std::tie(a, b) = wml2(shifted);
  return {a, b, mu};
}

}  // namespace weibull_detail

inline WeibullFit fit_weibull(const Sample& data, bool location, WeibullMethod method,
                              std::optional<ParamVector> starts = std::nullopt) {
  namespace wd = weibull_detail;
  require(data.size() >= 5 && stats::count_distinct(data) >= 5,
          "fit_weibull: need at least 5 distinct observations");
  for (double v : data) require(v > 0.0, "fit_weibull: data must be positive");
  require(weibull_method_valid(method, location),
          std::string("fit_weibull: method '") + weibull_method_name(method) +
              "' does not apply to the " + (location ? "three" : "two") +
              "-parameter distribution");

  WeibullFit fit;
  fit.method = method;
  double a = 0.0, b = 0.0, mu = 0.0;
  if (!location) {
    std::pair<double, double> ab;
    switch (method) {
      case WeibullMethod::ml: ab = wd::ml2(data); break;
      case WeibullMethod::moment: ab = wd::moment2(data); break;
      case WeibullMethod::mlm: ab = wd::logmoment2(data); break;
      case WeibullMethod::lm: ab = wd::lmoment2(data); break;
      case WeibullMethod::pm: ab = wd::percentile2(data); break;
      case WeibullMethod::reg: ab = wd::regression2(data, false, false); break;
      case WeibullMethod::wreg: ab = wd::regression2(data, true, false); break;
      case WeibullMethod::greg1: ab = wd::regression2(data, false, true); break;
      case WeibullMethod::greg2: ab = wd::regression2(data, true, true); break;
      case WeibullMethod::rank: ab = wd::rank2(data); break;
      case WeibullMethod::ustat: ab = wd::ustat2(data); break;
      case WeibullMethod::wml: ab = wd::wml2(data); break;
      default: throw domain_error("fit_weibull: unexpected two-parameter method");
    }
    a = ab.first;
    b = ab.second;
    fit.estimate = {a, b};
  } else {
    ParamVector s0 = starts.value_or(ParamVector{});
    bool needs_starts = method == WeibullMethod::mle || method == WeibullMethod::mps ||
                        method == WeibullMethod::mml1 || method == WeibullMethod::mml2 ||
                        method == WeibullMethod::mml3 || method == WeibullMethod::mml4 ||
                        method == WeibullMethod::wml;
    if (needs_starts && s0.size() != 3) s0 = wd::default_starts3(data);
    switch (method) {
      case WeibullMethod::mle: std::tie(a, b, mu) = wd::mle3(data); break;
      case WeibullMethod::mps: {
        auto [aa, bb, mm, conv, iters] = wd::mps3(data, s0);
        a = aa;
        b = bb;
        mu = mm;
        fit.converged = conv;
        fit.iterations = iters;
        break;
      }
      case WeibullMethod::mm1: std::tie(a, b, mu) = wd::modified_moments3(data, 1); break;
      case WeibullMethod::mm2: std::tie(a, b, mu) = wd::modified_moments3(data, 2); break;
      case WeibullMethod::mm3: std::tie(a, b, mu) = wd::modified_moments3(data, 3); break;
      case WeibullMethod::mml1: std::tie(a, b, mu) = wd::modified_ml3(data, 1); break;
      case WeibullMethod::mml2: std::tie(a, b, mu) = wd::modified_ml3(data, 2); break;
      case WeibullMethod::mml3: std::tie(a, b, mu) = wd::modified_ml3(data, 3); break;
      case WeibullMethod::mml4: std::tie(a, b, mu) = wd::modified_ml3(data, 4); break;
      case WeibullMethod::tlm: std::tie(a, b, mu) = wd::tlmoment3(data); break;
      case WeibullMethod::wml: std::tie(a, b, mu) = wd::wml3(data, s0); break;
      default: throw domain_error("fit_weibull: unexpected three-parameter method");
    }
    fit.estimate = {a, b, mu};
  }

  require(a > 0.0 && b > 0.0, "fit_weibull: estimator produced an invalid parameter");
  int k = location ? 3 : 2;
  ParamVector p = fit.estimate;
  fit.measures.log_likelihood = wd::loglik(data, a, b, location ? mu : 0.0);
  auto ic = information_criteria(fit.measures.log_likelihood, k,
                                 static_cast<double>(data.size()));
  fit.measures.aic = ic.aic;
  fit.measures.caic = ic.caic;
  fit.measures.bic = ic.bic;
  fit.measures.hqic = ic.hqic;
  auto edf = edf_statistics(data, FamilyTag::weibull, p);
  fit.measures.ad = edf.ad;
  fit.measures.cvm = edf.cvm;
  fit.measures.ks = edf.ks;
  if (edf.clamped) fit.measures.diagnostics.push_back("edf: boundary u-values clamped");
  return fit;
}

}  // namespace difit
