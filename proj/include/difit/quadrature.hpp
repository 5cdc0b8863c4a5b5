#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature with absolute-tolerance
// bisection. Semi-infinite ranges are mapped onto (0,1).

#include <cmath>
#include <functional>
#include <limits>

namespace difit::quad {

namespace detail {

// K15 nodes/weights on [-1,1]; G7 is the embedded rule (odd-index nodes).
inline constexpr double kx[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double kw[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double gw[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                 0.417959183673469, 0.381830050505119, 0.279705391489277,
                                 0.129484966168870};

struct Panel {
  double value;
  double error;
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double rk = 0.0, rg = 0.0;
  for (int i = 0; i < 15; ++i) {
    double v = f(mid + half * kx[i]);
    rk += kw[i] * v;
    if (i % 2 == 1) rg += gw[i / 2] * v;
  }
  return {rk * half, std::fabs((rk - rg) * half)};
}

template <class F>
double adaptive(const F& f, double a, double b, double abstol, int depth) {
  Panel p = gk15(f, a, b);
  if (p.error <= abstol || depth >= 50) return p.value;
  double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, abstol * 0.5, depth + 1) +
         adaptive(f, mid, b, abstol * 0.5, depth + 1);
}

}  // namespace detail

/// Integrate f over the finite interval [a, b] to absolute tolerance abstol.
template <class F>
double integrate(const F& f, double a, double b, double abstol = 1e-10) {
  if (!(b > a)) return 0.0;
  return detail::adaptive(f, a, b, abstol, 0);
}

/// Integrate f over [a, +inf) via the substitution x = a + t/(1-t).
template <class F>
double integrate_upper(const F& f, double a, double abstol = 1e-10) {
  auto g = [&f, a](double t) {
    double om = 1.0 - t;
    double x = a + t / om;
    return f(x) / (om * om);
  };
  return detail::adaptive(g, 0.0, 1.0 - 1e-14, abstol, 0);
}

/// Integrate f over the whole real line, split at 0.
template <class F>
double integrate_real_line(const F& f, double abstol = 1e-10) {
  auto g = [&f](double x) { return f(-x); };
  return integrate_upper(f, 0.0, abstol * 0.5) + integrate_upper(g, 0.0, abstol * 0.5);
}

}  // namespace difit::quad
