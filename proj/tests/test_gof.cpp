#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "difit/gof.hpp"
#include "oracle.hpp"

using namespace difit;

TEST_CASE("information criteria reproduce the published weibull block") {
  auto ic = information_criteria(-116.3826, 3, 31);
  CHECK(ic.aic == Catch::Approx(238.7652).margin(1e-3));
  CHECK(ic.caic == Catch::Approx(239.6541).margin(1e-3));
  CHECK(ic.bic == Catch::Approx(243.0673).margin(1e-3));
  CHECK(ic.hqic == Catch::Approx(240.1680).margin(1e-3));
}

TEST_CASE("information criteria reproduce the published grouped block") {
  // The grouped block backsolves to k = 2 and n = 57 (total frequency):
  // every one of the four printed values is then exact to 4 decimals.
  auto ic = information_criteria(-10.406305, 2, 57);
  CHECK(ic.aic == Catch::Approx(24.81261).margin(5e-5));
  CHECK(ic.caic == Catch::Approx(25.03483).margin(5e-5));
  CHECK(ic.bic == Catch::Approx(28.89871).margin(5e-5));
  CHECK(ic.hqic == Catch::Approx(26.4006).margin(5e-4));
}

TEST_CASE("information criteria direct formula checks") {
  auto ic = information_criteria(-50.0, 2, 100);
  CHECK(ic.bic == Catch::Approx(2.0 * std::log(100.0) + 100.0).epsilon(1e-12));
  CHECK(information_criteria(0.0, 0, 10).aic == 0.0);
  CHECK_THROWS_AS(information_criteria(-1.0, 3, 4), domain_error);
}

TEST_CASE("cvm attains its minimum on the uniform quantile grid") {
  const std::size_t n = 17;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (2.0 * (i + 1) - 1.0) / (2.0 * n);
  auto s = edf_statistics_from_u(u);
  CHECK(s.cvm == Catch::Approx(1.0 / (12.0 * n)).epsilon(1e-12));
  CHECK(s.ks == Catch::Approx(1.0 / (2.0 * n)).epsilon(1e-12));
}

TEST_CASE("edf statistics match brute-force definitions on a small sample") {
  Sample x{0.7, 2.1, 1.3, 3.9, 0.2};
  ParamVector p{1.5, 2.0};
  auto s = edf_statistics(x, FamilyTag::weibull, p);

  Sample sorted = x;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = cdf(FamilyTag::weibull, p, sorted[i]);
  double ad = 0.0, cvm = 1.0 / (12.0 * n), ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ad += (2.0 * (i + 1.0) - 1.0) * (std::log(u[i]) + std::log(1.0 - u[n - 1 - i]));
    cvm += std::pow(u[i] - (2.0 * (i + 1.0) - 1.0) / (2.0 * n), 2);
    ks = std::max({ks, (i + 1.0) / n - u[i], u[i] - i / static_cast<double>(n)});
  }
  ad = -static_cast<double>(n) - ad / n;
  CHECK(s.ad == Catch::Approx(ad).epsilon(1e-12));
  CHECK(s.cvm == Catch::Approx(cvm).epsilon(1e-12));
  CHECK(s.ks == Catch::Approx(ks).epsilon(1e-12));
}

TEST_CASE("edf statistics are permutation invariant") {
  Sample x{0.7, 2.1, 1.3, 3.9, 0.2, 1.1, 2.8};
  ParamVector p{1.5, 2.0};
  auto s1 = edf_statistics(x, FamilyTag::weibull, p);
  std::shuffle(x.begin(), x.end(), std::mt19937(3));
  auto s2 = edf_statistics(x, FamilyTag::weibull, p);
  CHECK(s1.ad == s2.ad);
  CHECK(s1.cvm == s2.cvm);
  CHECK(s1.ks == s2.ks);
}

TEST_CASE("ks is invariant under a strictly increasing transform") {
  RngStream rng(55);
  ParamVector p{2.0, 3.0};
  auto x = sample(FamilyTag::weibull, p, 200, rng);
  auto s = edf_statistics(x, FamilyTag::weibull, p);
  Sample logged(x.size());
  std::transform(x.begin(), x.end(), logged.begin(), [](double v) { return std::log(v); });
  auto s2 = edf_statistics(logged,
                           [&](double y) { return cdf(FamilyTag::weibull, p, std::exp(y)); });
  CHECK(s.ks == Catch::Approx(s2.ks).epsilon(1e-12));
}

TEST_CASE("u values of exactly 0 or 1 are clamped and flagged") {
  auto s = edf_statistics_from_u({0.0, 0.5, 1.0});
  CHECK(s.clamped);
  CHECK(std::isfinite(s.ad));
}

TEST_CASE("grouped chi-square vanishes for a perfect fit") {
  GroupedSample g;
  g.boundaries = {0.0, 1.0, 2.0, 3.0};
  // expected frequencies of weibull(1, 1) in these classes, n = 100
  ParamVector p{1.0, 1.0};
  double n = 100.0;
  g.frequencies = {n * cdf(FamilyTag::weibull, p, 1.0),
                   n * (cdf(FamilyTag::weibull, p, 2.0) - cdf(FamilyTag::weibull, p, 1.0)),
                   n * (1.0 - cdf(FamilyTag::weibull, p, 2.0))};
  auto r = grouped_chi_square(g, FamilyTag::weibull, p);
  CHECK(r.value == Catch::Approx(0.0).margin(1e-20));
}

TEST_CASE("grouped chi-square matches hand arithmetic with tail folding") {
  GroupedSample g;
  g.boundaries = {1.0, 2.0, 3.0, 4.0};
  g.frequencies = {4.0, 3.0, 3.0};
  ParamVector p{1.0, 2.0};  // exponential, mean 2
  double F2 = cdf(FamilyTag::weibull, p, 2.0);
  double F3 = cdf(FamilyTag::weibull, p, 3.0);
  // tail mass folded: p1 = F(2), p2 = F(3)-F(2), p3 = 1-F(3)
  double p1 = F2, p2 = F3 - F2, p3 = 1.0 - F3;
  double n = 10.0;
  double expect = std::pow(4 - n * p1, 2) / (n * p1) + std::pow(3 - n * p2, 2) / (n * p2) +
                  std::pow(3 - n * p3, 2) / (n * p3);
  auto r = grouped_chi_square(g, FamilyTag::weibull, p);
  CHECK(r.value == Catch::Approx(expect).epsilon(1e-12));
  CHECK_FALSE(r.merged);
}

TEST_CASE("vanishing-probability classes are merged and reported") {
  GroupedSample g;
  g.boundaries = {0.0, 1.0, 1.0 + 1e-15, 3.0};
  g.frequencies = {5.0, 0.0, 5.0};
  auto r = grouped_chi_square(g, FamilyTag::weibull, {1.0, 1.0});
  CHECK(r.merged);
  CHECK(std::isfinite(r.value));
}
