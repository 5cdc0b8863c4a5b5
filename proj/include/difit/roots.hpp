#pragma once

// Bracketed scalar root finding: bracket expansion followed by a hybrid
// bisection/secant iteration (capped at 200 iterations).

#include <cmath>
#include <functional>

#include "difit/common.hpp"

namespace difit::roots {

/// Find x in [lo, hi] with f(x) = 0, assuming f(lo) and f(hi) have opposite
/// signs. Hybrid secant/bisection.
template <class F>
double solve_bracketed(const F& f, double lo, double hi, double xtol = 1e-12,
                       double ftol = 0.0) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  require(flo * fhi < 0.0, "solve_bracketed: endpoints do not bracket a root");
  for (int it = 0; it < 200; ++it) {
    // secant candidate, fall back to bisection when it leaves the bracket
    double x = hi - fhi * (hi - lo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    double fx = f(x);
    if (fx == 0.0 || std::fabs(hi - lo) < xtol * (1.0 + std::fabs(x)) ||
        std::fabs(fx) <= ftol)
      return x;
    if (flo * fx < 0.0) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    // force bisection progress when the bracket stalls
    if (it % 4 == 3) {
      double m = 0.5 * (lo + hi), fm = f(m);
      if (flo * fm <= 0.0) {
        hi = m;
        fhi = fm;
      } else {
        lo = m;
        flo = fm;
      }
    }
  }
  return 0.5 * (lo + hi);
}

/// Expand a bracket around x0 (multiplicative for positive-only domains is the
/// caller's job; this works additively/geometrically) until f changes sign,
/// then solve. `lo_bound`/`hi_bound` clip the search.
template <class F>
double solve_expanding(const F& f, double x0, double step, double lo_bound,
                       double hi_bound, double xtol = 1e-12) {
  double lo = x0, hi = x0;
  double flo = f(x0), fhi = flo;
  for (int k = 0; k < 200 && flo * fhi > 0.0; ++k) {
    step *= 1.6;
    if (flo > 0.0 ? f(lo) > 0.0 : true) {
      lo = std::fmax(lo_bound, lo - step);
      flo = f(lo);
    }
    if (flo * fhi <= 0.0) break;
    hi = std::fmin(hi_bound, hi + step);
    fhi = f(hi);
  }
  require(flo * fhi <= 0.0, "solve_expanding: failed to bracket a root");
  return solve_bracketed(f, lo, hi, xtol);
}

}  // namespace difit::roots
