#pragma once

// Nine height-diameter growth curves fitted by damped Gauss-Newton least
// squares with analytic Jacobians, plus the usual regression summary
// (standard errors, t values, p-values, residuals, covariance).

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "difit/common.hpp"
#include "difit/optim.hpp"
#include "difit/special.hpp"

namespace difit {

enum class GrowthModel {
  chapman_richards,
  gompertz,
  hossfeldiv,
  korf,
  logistic,
  prodan,
  ratkowsky,
  sibbesen,
  weibull,
};

inline const char* growth_model_name(GrowthModel m) {
  switch (m) {
    case GrowthModel::chapman_richards: return "chapman-richards";
    case GrowthModel::gompertz: return "gompertz";
    case GrowthModel::hossfeldiv: return "hossfeldiv";
    case GrowthModel::korf: return "korf";
    case GrowthModel::logistic: return "logistic";
    case GrowthModel::prodan: return "prodan";
    case GrowthModel::ratkowsky: return "ratkowsky";
    case GrowthModel::sibbesen: return "sibbesen";
    case GrowthModel::weibull: return "weibull";
  }
  return "?";
}

inline GrowthModel growth_model_from_string(const std::string& s) {
  for (GrowthModel m :
       {GrowthModel::chapman_richards, GrowthModel::gompertz, GrowthModel::hossfeldiv,
        GrowthModel::korf, GrowthModel::logistic, GrowthModel::prodan, GrowthModel::ratkowsky,
        GrowthModel::sibbesen, GrowthModel::weibull})
    if (s == growth_model_name(m)) return m;
  throw domain_error("unknown growth model: " + s);
}

/// Predicted height at diameter d; breast height 1.3 is part of every form.
inline double growth_height(GrowthModel m, const ParamVector& b, double d) {
  require(b.size() == 3, "growth: three parameters expected");
  double b1 = b[0], b2 = b[1], b3 = b[2];
  switch (m) {
    case GrowthModel::chapman_richards: return 1.3 + b1 + b2 / (d + b3);
    case GrowthModel::gompertz: return 1.3 + b1 * std::exp(-b2 * std::exp(-b3 * d));
    case GrowthModel::hossfeldiv: return 1.3 + b1 / (1.0 + 1.0 / (b2 * std::pow(d, b3)));
    case GrowthModel::korf: return 1.3 + b1 * std::exp(-b2 * std::pow(d, -b3));
    case GrowthModel::logistic: return 1.3 + b1 / (1.0 + b2 * std::exp(-b3 * d));
    case GrowthModel::prodan: return 1.3 + d * d / (b1 * d * d + b2 * d + b3);
    case GrowthModel::ratkowsky: return 1.3 + b1 * std::exp(-b2 / (d + b3));
    case GrowthModel::sibbesen: return 1.3 + b1 * std::pow(d, b2 * std::pow(d, -b3));
    case GrowthModel::weibull: return 1.3 + b1 * (1.0 - std::exp(-b2 * std::pow(d, b3)));
  }
  return 0.0;
}

/// Partial derivatives of the predicted height with respect to each beta.
inline std::array<double, 3> growth_gradient(GrowthModel m, const ParamVector& b, double d) {
  double b1 = b[0], b2 = b[1], b3 = b[2];
  switch (m) {
    case GrowthModel::chapman_richards: {
      double s = d + b3;
      return {1.0, 1.0 / s, -b2 / (s * s)};
    }
    case GrowthModel::gompertz: {
      double e = std::exp(-b3 * d), g = std::exp(-b2 * e);
      return {g, -b1 * g * e, b1 * g * b2 * e * d};
    }
    case GrowthModel::hossfeldiv: {
      double u = b2 * std::pow(d, b3), den = 1.0 + u;
      return {u / den, b1 * std::pow(d, b3) / (den * den),
              b1 * u * std::log(d) / (den * den)};
    }
    case GrowthModel::korf: {
      double p = std::pow(d, -b3), e = std::exp(-b2 * p);
      return {e, -b1 * e * p, b1 * e * b2 * p * std::log(d)};
    }
    case GrowthModel::logistic: {
      double e = std::exp(-b3 * d), den = 1.0 + b2 * e;
      return {1.0 / den, -b1 * e / (den * den), b1 * b2 * d * e / (den * den)};
    }
    case GrowthModel::prodan: {
      double q = b1 * d * d + b2 * d + b3, q2 = q * q;
      return {-d * d * d * d / q2, -d * d * d / q2, -d * d / q2};
    }
    case GrowthModel::ratkowsky: {
      double s = d + b3, e = std::exp(-b2 / s);
      return {e, -b1 * e / s, b1 * e * b2 / (s * s)};
    }
    case GrowthModel::sibbesen: {
      double expo = b2 * std::pow(d, -b3), p = std::pow(d, expo), ld = std::log(d);
      return {p, b1 * p * std::pow(d, -b3) * ld, -b1 * p * expo * ld * ld};
    }
    case GrowthModel::weibull: {
      double p = std::pow(d, b3), e = std::exp(-b2 * p);
      return {1.0 - e, b1 * e * p, b1 * e * b2 * p * std::log(d)};
    }
  }
  return {0.0, 0.0, 0.0};
}

struct GrowthFit {
  ParamVector estimate;                          // beta1..beta3
  std::array<double, 3> std_error{}, t_value{}, p_value{};
  std::vector<double> residuals;                 // input order
  std::vector<std::vector<double>> var_cov;      // 3 x 3
  double residual_std_error = 0.0;
  double rss = 0.0;
  bool converged = true;
  int iterations = 0;
};

inline GrowthFit fit_growth(const Sample& h, const Sample& d, GrowthModel model,
                            const ParamVector& starts) {
  require(h.size() == d.size(), "fit_growth: height and diameter lengths differ");
  require(h.size() >= 4, "fit_growth: need at least 4 observations");
  for (double v : d) require(v > 0.0, "fit_growth: diameters must be positive");
  require(starts.size() == 3, "fit_growth: three starting values expected");
  const std::size_t n = h.size();

  auto residuals = [&](const std::vector<double>& b, std::vector<double>& r) {
    r.resize(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = h[i] - growth_height(model, b, d[i]);
  };
  auto jacobian = [&](const std::vector<double>& b, std::vector<std::vector<double>>& J) {
    J.assign(n, std::vector<double>(3));
    for (std::size_t i = 0; i < n; ++i) {
      auto g = growth_gradient(model, b, d[i]);
      for (int j = 0; j < 3; ++j) J[i][j] = -g[j];  // residual = h - H
    }
  };

  auto res = optim::levenberg(residuals, jacobian, starts, 500, 1e-12);
  if (!res.converged)
    throw convergence_error("fit_growth: no convergence in 500 iterations", res.x);
  if (res.jtj_inv.empty()) {
    // name the parameter with the weakest curvature
    std::vector<std::vector<double>> J;
    jacobian(res.x, J);
    double diag[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) diag[j] += J[i][j] * J[i][j];
    int worst = 0;
    for (int j = 1; j < 3; ++j)
      if (diag[j] < diag[worst]) worst = j;
    throw domain_error("fit_growth: singular normal equations (beta" +
                       std::to_string(worst + 1) + " is ill conditioned)");
  }

  GrowthFit fit;
  fit.estimate = res.x;
  fit.converged = true;
  fit.iterations = res.iterations;
  fit.rss = res.rss;
  double dof = static_cast<double>(n) - 3.0;
  double sigma2 = res.rss / dof;
  fit.residual_std_error = std::sqrt(sigma2);
  fit.var_cov.assign(3, std::vector<double>(3));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) fit.var_cov[a][b] = sigma2 * res.jtj_inv[a][b];
  for (int j = 0; j < 3; ++j) {
    fit.std_error[j] = std::sqrt(fit.var_cov[j][j]);
    fit.t_value[j] = fit.estimate[j] / fit.std_error[j];
    fit.p_value[j] = 2.0 * (1.0 - special::student_t_cdf(std::fabs(fit.t_value[j]), dof));
  }
  std::vector<double> r;
  residuals(fit.estimate, r);
  fit.residuals = r;
  return fit;
}

}  // namespace difit
