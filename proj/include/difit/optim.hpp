#pragma once

// Derivative-free simplex minimizer and a damped Gauss-Newton (Levenberg)
// nonlinear least-squares solver. Both are deliberately small; the fitting
// modules wrap them with problem-specific parameterizations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "difit/common.hpp"

namespace difit::optim {

struct SimplexResult {
  std::vector<double> x;
  double fmin = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Nelder-Mead minimization. Objectives may return +inf to reject a point
/// (acts as a hard barrier). Converges when the function spread and simplex
/// size fall below tolerance.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, double ftol = 1e-10,
                                 double xtol = 1e-8, int max_iter = 2000) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double step = x0[i] != 0.0 ? 0.05 * std::fabs(x0[i]) : 0.00025;
    pts[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = pts[idx[i]];
      f2[i] = fv[idx[i]];
    }
    pts.swap(p2);
    fv.swap(f2);
  };

  SimplexResult res;
  int it = 0;
  for (; it < max_iter; ++it) {
    order();
    double fspread = std::fabs(fv[n] - fv[0]);
    double xspread = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      xspread = std::max(xspread, std::fabs(pts[n][j] - pts[0][j]));
    if (fspread < ftol * (1.0 + std::fabs(fv[0])) && xspread < xtol * (1.0 + std::fabs(pts[0][0]))) {
      res.converged = true;
      break;
    }
    // centroid of all but worst
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[j] += pts[i][j] / n;
    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = c[j] + t * (pts[n][j] - c[j]);
      return p;
    };
    std::vector<double> xr = blend(-1.0);
    double fr = f(xr);
    if (fr < fv[0]) {
      std::vector<double> xe = blend(-2.0);
      double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
    } else {
      bool outside = fr < fv[n];
      std::vector<double> xc = blend(outside ? -0.5 : 0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        pts[n] = xc;
        fv[n] = fc;
      } else {
        // shrink toward best
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  order();
  res.x = pts[0];
  res.fmin = fv[0];
  res.iterations = it;
  if (!res.converged && it >= max_iter) res.converged = false;
  return res;
}

struct LeastSquaresResult {
  std::vector<double> x;
  double rss = 0.0;
  std::vector<std::vector<double>> jtj_inv;  // (J^T J)^-1 at the optimum
  bool converged = false;
  int iterations = 0;
};

/// Solve a symmetric positive definite system by Cholesky; returns false on
/// a non-positive pivot.
inline bool cholesky_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                           std::vector<double>& x) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
      if (i == j) {
        if (s <= 0.0) return false;
        a[i][i] = std::sqrt(s);
      } else {
        a[i][j] = s / a[j][j];
      }
    }
  }
  // forward/backward substitution
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
    b[i] = s / a[i][i];
  }
  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k][ii] * x[k];
    x[ii] = s / a[ii][ii];
  }
  return true;
}

/// Invert a symmetric positive definite matrix via Cholesky column solves.
inline bool spd_inverse(const std::vector<std::vector<double>>& a,
                        std::vector<std::vector<double>>& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0), col;
    e[j] = 1.0;
    if (!cholesky_solve(a, e, col)) return false;
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return true;
}

/// Damped Gauss-Newton (Levenberg) minimization of ||r(x)||^2. `residuals`
/// fills r, `jacobian` fills the n x p Jacobian of r.
inline LeastSquaresResult levenberg(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& residuals,
    const std::function<void(const std::vector<double>&, std::vector<std::vector<double>>&)>&
        jacobian,
    std::vector<double> x0, int max_iter = 500, double gtol = 1e-10) {
  const std::size_t p = x0.size();
  LeastSquaresResult out;
  std::vector<double> r;
  residuals(x0, r);
  const std::size_t n = r.size();
  double rss = 0.0;
  for (double v : r) rss += v * v;
  double lambda = 1e-3;

  std::vector<std::vector<double>> J;
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    jacobian(x0, J);
    // J^T J and J^T r
    std::vector<std::vector<double>> jtj(p, std::vector<double>(p, 0.0));
    std::vector<double> jtr(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < p; ++a) {
        jtr[a] += J[i][a] * r[i];
        for (std::size_t b = 0; b <= a; ++b) jtj[a][b] += J[i][a] * J[i][b];
      }
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a + 1; b < p; ++b) jtj[a][b] = jtj[b][a];

    double gmax = 0.0;
    for (double g : jtr) gmax = std::max(gmax, std::fabs(g));
    if (gmax < gtol * (1.0 + rss)) {
      out.converged = true;
      break;
    }

    bool stepped = false;
    for (int tries = 0; tries < 30; ++tries) {
      auto damped = jtj;
      for (std::size_t a = 0; a < p; ++a) damped[a][a] += lambda * (jtj[a][a] + 1e-12);
      std::vector<double> neg(jtr), step;
      if (!cholesky_solve(damped, neg, step)) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> xt(p);
      for (std::size_t a = 0; a < p; ++a) xt[a] = x0[a] - step[a];
      std::vector<double> rt;
      residuals(xt, rt);
      double rsst = 0.0;
      for (double v : rt) rsst += v * v;
      if (std::isfinite(rsst) && rsst < rss) {
        x0 = xt;
        r = rt;
        double rel = (rss - rsst) / (1.0 + rss);
        rss = rsst;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (rel < 1e-14) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      out.converged = true;  // no further descent possible
      break;
    }
    if (out.converged) break;
  }
  out.x = x0;
  out.rss = rss;
  jacobian(x0, J);
  std::vector<std::vector<double>> jtj(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) jtj[a][b] += J[i][a] * J[i][b];
  if (!spd_inverse(jtj, out.jtj_inv)) out.jtj_inv.clear();
  return out;
}

}  // namespace difit::optim
