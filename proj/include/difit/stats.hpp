#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "difit/common.hpp"

namespace difit::stats {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample variance with the n-1 denominator.
inline double variance(const std::vector<double>& v) {
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double sd(const std::vector<double>& v) { return std::sqrt(variance(v)); }

inline double skewness(const std::vector<double>& v) {
  double m = mean(v), s2 = 0.0, s3 = 0.0;
  for (double x : v) {
    double d = x - m;
    s2 += d * d;
    s3 += d * d * d;
  }
  double n = static_cast<double>(v.size());
  return (s3 / n) / std::pow(s2 / n, 1.5);
}

inline std::vector<double> sorted(std::vector<double> v) {
  std::stable_sort(v.begin(), v.end());
  return v;
}

inline double min(const std::vector<double>& v) {
  return *std::min_element(v.begin(), v.end());
}

/// Linear-interpolation sample quantile at knots (i-1)/(n-1) (R type 7).
inline double quantile_type7(const std::vector<double>& sorted_v, double p) {
  double h = (static_cast<double>(sorted_v.size()) - 1.0) * p;
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted_v.size()) return sorted_v.back();
  return sorted_v[lo] + (h - static_cast<double>(lo)) * (sorted_v[lo + 1] - sorted_v[lo]);
}

inline std::size_t count_distinct(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace difit::stats
