#pragma once

// Goodness-of-fit block attached to every fit: information criteria, EDF
// statistics (AD, CVM, KS), and the grouped-data chi-square.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "difit/common.hpp"
#include "difit/distributions.hpp"
#include "difit/grouped_data.hpp"

namespace difit {

struct GofBlock {
  std::optional<double> aic, caic, bic, hqic;
  double ad = 0.0, cvm = 0.0, ks = 0.0;
  std::optional<double> chi_square;
  double log_likelihood = 0.0;
  std::vector<std::string> diagnostics;
};

struct InformationCriteria {
  double aic, caic, bic, hqic;
};

/// AIC, corrected AIC ("CAIC"), BIC, and HQIC from a log-likelihood, the
/// number of free parameters k, and the effective sample size n.
inline InformationCriteria information_criteria(double loglik, int k, double n) {
  require(n > k + 1, "information_criteria: degenerate sample (n <= k + 1)");
  InformationCriteria ic;
  ic.aic = 2.0 * k - 2.0 * loglik;
  ic.caic = ic.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0);
  ic.bic = k * std::log(n) - 2.0 * loglik;
  ic.hqic = 2.0 * k * std::log(std::log(n)) - 2.0 * loglik;
  return ic;
}

struct EdfStatistics {
  double ad, cvm, ks;
  bool clamped = false;
};

/// AD, CVM, KS from probability-integral transforms u_i = F(x_(i)). Values
/// exactly 0 or 1 are clamped to [1e-12, 1 - 1e-12] and flagged.
inline EdfStatistics edf_statistics_from_u(std::vector<double> u) {
  require(!u.empty(), "edf_statistics: empty sample");
  std::stable_sort(u.begin(), u.end());
  const std::size_t n = u.size();
  EdfStatistics s{0.0, 0.0, 0.0};
  for (auto& v : u) {
    if (v <= 0.0 || v >= 1.0) {
      v = std::clamp(v, 1e-12, 1.0 - 1e-12);
      s.clamped = true;
    }
  }
  double ad = 0.0, cvm = 1.0 / (12.0 * n), ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ui = u[i];
    double i1 = static_cast<double>(i + 1);
    ad += (2.0 * i1 - 1.0) * (std::log(ui) + std::log1p(-u[n - 1 - i]));
    double d = ui - (2.0 * i1 - 1.0) / (2.0 * n);
    cvm += d * d;
    ks = std::max(ks, std::max(i1 / n - ui, ui - (i1 - 1.0) / n));
  }
  s.ad = -static_cast<double>(n) - ad / n;
  s.cvm = cvm;
  s.ks = ks;
  return s;
}

inline EdfStatistics edf_statistics(const Sample& data,
                                    const std::function<double(double)>& cdf_fn) {
  std::vector<double> u(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) u[i] = cdf_fn(data[i]);
  return edf_statistics_from_u(std::move(u));
}

inline EdfStatistics edf_statistics(const Sample& data, FamilyTag f, const ParamVector& p) {
  return edf_statistics(data, [&](double x) { return cdf(f, p, x); });
}

/// EDF statistics for grouped data: the empirical step CDF of class midpoints
/// weighted by frequency (each midpoint expanded to its count).
inline EdfStatistics edf_statistics_grouped(const GroupedSample& g,
                                            const std::function<double(double)>& cdf_fn) {
  std::vector<double> u;
  for (std::size_t i = 0; i < g.class_count(); ++i) {
    double ui = cdf_fn(g.midpoint(i));
    long c = std::lround(g.frequencies[i]);
    for (long j = 0; j < c; ++j) u.push_back(ui);
  }
  return edf_statistics_from_u(std::move(u));
}

struct ChiSquareResult {
  double value;
  bool merged = false;  // adjacent classes merged due to vanishing probability
};

/// Pearson chi-square on grouped data. Tail mass outside [r0, rm] is folded
/// into the first/last classes so the class probabilities sum to one.
inline ChiSquareResult grouped_chi_square(const GroupedSample& g,
                                          const std::function<double(double)>& cdf_fn) {
  g.validate();
  const std::size_t m = g.class_count();
  double n = g.total();
  std::vector<double> prob(m), freq(g.frequencies);
  for (std::size_t i = 0; i < m; ++i) {
    double lo = (i == 0) ? 0.0 : cdf_fn(g.boundaries[i]);
    double hi = (i == m - 1) ? 1.0 : cdf_fn(g.boundaries[i + 1]);
    prob[i] = hi - lo;
  }
  ChiSquareResult out{0.0, false};
  // merge any vanishing-probability class into its neighbor
  for (std::size_t i = 0; i < prob.size();) {
    if (prob[i] < 1e-12 && prob.size() > 1) {
      std::size_t j = (i == 0) ? 1 : i - 1;
      prob[j] += prob[i];
      freq[j] += freq[i];
      prob.erase(prob.begin() + i);
      freq.erase(freq.begin() + i);
      out.merged = true;
    } else {
      ++i;
    }
  }
  for (std::size_t i = 0; i < prob.size(); ++i) {
    double e = n * prob[i];
    double d = freq[i] - e;
    out.value += d * d / e;
  }
  return out;
}

inline ChiSquareResult grouped_chi_square(const GroupedSample& g, FamilyTag f,
                                          const ParamVector& p) {
  return grouped_chi_square(g, [&](double x) { return cdf(f, p, x); });
}

/// Log of the multinomial coefficient n! / (f_1! ... f_m!).
inline double log_multinomial_coefficient(const GroupedSample& g) {
  double n = g.total();
  double v = std::lgamma(n + 1.0);
  for (double f : g.frequencies) v -= std::lgamma(f + 1.0);
  return v;
}

}  // namespace difit
