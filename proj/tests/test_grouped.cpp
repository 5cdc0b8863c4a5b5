#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "difit/grouped.hpp"
#include "difit/rng.hpp"
#include "difit/weibull_fit.hpp"

using namespace difit;

namespace {

Sample draw(FamilyTag f, const ParamVector& p, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  return sample(f, p, n, rng);
}

double grouped_kernel(FamilyTag f, const ParamVector& p, const GroupedSample& g) {
  double ll = 0.0;
  std::size_t m = g.class_count();
  for (std::size_t i = 0; i < m; ++i) {
    if (g.frequencies[i] == 0.0) continue;
    double lo = (i == 0) ? 0.0 : cdf(f, p, g.boundaries[i]);
    double hi = (i == m - 1) ? 1.0 : cdf(f, p, g.boundaries[i + 1]);
    ll += g.frequencies[i] * std::log(hi - lo);
  }
  return ll;
}

}  // namespace

TEST_CASE("group bins by hand-countable example") {
  auto g = group({1.0, 2.0, 3.0, 4.0}, 2);
  REQUIRE(g.boundaries == std::vector<double>{1.0, 2.5, 4.0});
  REQUIRE(g.frequencies == std::vector<double>{2.0, 2.0});
}

TEST_CASE("group reproduces linear-interpolation boundaries and conserves counts") {
  auto x = draw(FamilyTag::weibull, {2.0, 10.0, 3.0}, 500, 11);
  auto g = group(x, 7);
  double lo = *std::min_element(x.begin(), x.end());
  double hi = *std::max_element(x.begin(), x.end());
  for (std::size_t i = 0; i <= 7; ++i)
    CHECK(g.boundaries[i] == Catch::Approx(lo + i * (hi - lo) / 7.0).margin(1e-12 * hi));
  CHECK(g.total() == 500.0);
  CHECK_THROWS_AS(group({2.0, 2.0, 2.0}, 2), domain_error);
  CHECK_THROWS_AS(group({1.0, 2.0}, 1), domain_error);
}

TEST_CASE("grouped ml on fine classes matches the ungrouped ml fit") {
  auto x = draw(FamilyTag::weibull, {2.0, 10.0, 3.0}, 10000, 2024);
  auto g = group(x, 50);
  auto ungrouped = fit_weibull(x, true, WeibullMethod::mle);
  auto fit = fit_grouped(g, FamilyTag::weibull, GroupedMethod::ml,
                         ParamVector{2.0, 10.0, 2.5});
  for (int j = 0; j < 3; ++j) {
    INFO("param " << j);
    CHECK(fit.estimate[j] ==
          Catch::Approx(ungrouped.estimate[j]).epsilon(0.05).margin(0.05 * fit.estimate[1]));
  }
  CHECK(fit.estimate[2] < g.boundaries.front());
}

TEST_CASE("em trace is monotone and em agrees with ml on the maximized kernel") {
  auto x = draw(FamilyTag::weibull, {2.0, 10.0, 3.0}, 2000, 404);
  auto g = group(x, 12);
  auto em = fit_grouped(g, FamilyTag::weibull, GroupedMethod::em);
  REQUIRE(em.em_trace.size() >= 2);
  for (std::size_t i = 1; i < em.em_trace.size(); ++i)
    CHECK(em.em_trace[i] >= em.em_trace[i - 1] - 1e-12);
  auto ml = fit_grouped(g, FamilyTag::weibull, GroupedMethod::ml, em.estimate);
  double k_em = grouped_kernel(FamilyTag::weibull, em.estimate, g);
  double k_ml = grouped_kernel(FamilyTag::weibull, ml.estimate, g);
  CHECK(k_em == Catch::Approx(k_ml).margin(1e-4));
}

TEST_CASE("refining the classes moves grouped ml toward ungrouped ml") {
  auto x = draw(FamilyTag::weibull, {1.8, 9.0, 2.0}, 5000, 42);
  auto ungrouped = fit_weibull(x, true, WeibullMethod::mle);
  auto dist = [&](const ParamVector& p) {
    double d = 0.0;
    for (int j = 0; j < 3; ++j) {
      double rel = (p[j] - ungrouped.estimate[j]) / (1.0 + std::fabs(ungrouped.estimate[j]));
      d += rel * rel;
    }
    return std::sqrt(d);
  };
  double prev = 1e300;
  ParamVector warm{1.8, 9.0, 1.5};
  for (std::size_t m : {8, 16, 32, 64}) {
    auto fit = fit_grouped(group(x, m), FamilyTag::weibull, GroupedMethod::ml, warm);
    warm = fit.estimate;
    double d = dist(fit.estimate);
    INFO("m=" << m << " d=" << d);
    CHECK(d < prev + 1e-12);
    prev = d;
  }
}

TEST_CASE("em recovers birnbaum-saunders and ge parameters from grouped data") {
  {
    auto x = draw(FamilyTag::birnbaum_saunders, {0.6, 8.6, 8.4}, 4000, 626);
    auto g = group(x, 10);
    auto fit = fit_grouped(g, FamilyTag::birnbaum_saunders, GroupedMethod::em);
    CHECK(fit.estimate[0] == Catch::Approx(0.6).epsilon(0.30));
    CHECK(fit.estimate[1] == Catch::Approx(8.6).epsilon(0.20));
    CHECK(fit.estimate[2] == Catch::Approx(8.4).margin(2.5));
    CHECK(fit.estimate[2] < g.boundaries.front());
  }
  {
    auto x = draw(FamilyTag::ge, {2.0, 0.8, 1.0}, 4000, 727);
    auto g = group(x, 10);
    auto fit = fit_grouped(g, FamilyTag::ge, GroupedMethod::em);
    CHECK(fit.estimate[0] == Catch::Approx(2.0).epsilon(0.35));
    CHECK(fit.estimate[1] == Catch::Approx(0.8).epsilon(0.30));
    CHECK(fit.estimate[2] == Catch::Approx(1.0).margin(0.8));
  }
}

TEST_CASE("aml gets close to the truth when classes are fine") {
  auto x = draw(FamilyTag::weibull, {2.0, 10.0, 3.0}, 10000, 838);
  auto g = group(x, 50);
  auto fit = fit_grouped(g, FamilyTag::weibull, GroupedMethod::aml,
                         ParamVector{2.0, 10.0, 2.5});
  CHECK(fit.estimate[0] == Catch::Approx(2.0).epsilon(0.15));
  CHECK(fit.estimate[1] == Catch::Approx(10.0).epsilon(0.10));
  CHECK(fit.estimate[2] == Catch::Approx(3.0).margin(1.5));
}

TEST_CASE("grouped gof block follows the published conventions") {
  auto x = draw(FamilyTag::weibull, {2.0, 10.0, 3.0}, 500, 949);
  auto g = group(x, 6);
  auto fit = fit_grouped(g, FamilyTag::weibull, GroupedMethod::ml,
                         ParamVector{2.0, 10.0, 2.5});
  double expected_ll =
      grouped_kernel(FamilyTag::weibull, fit.estimate, g) + log_multinomial_coefficient(g);
  CHECK(fit.measures.log_likelihood == Catch::Approx(expected_ll).epsilon(1e-12));
  REQUIRE(fit.measures.aic.has_value());
  // criteria use k = 2 and n = total frequency
  CHECK(*fit.measures.aic == Catch::Approx(4.0 - 2.0 * expected_ll).epsilon(1e-12));
  CHECK(*fit.measures.bic ==
        Catch::Approx(2.0 * std::log(g.total()) - 2.0 * expected_ll).epsilon(1e-12));
  REQUIRE(fit.measures.chi_square.has_value());
  CHECK(*fit.measures.chi_square >= 0.0);
}

TEST_CASE("grouped fitting rejects invalid requests") {
  auto x = draw(FamilyTag::weibull, {2.0, 10.0, 3.0}, 200, 111);
  auto g = group(x, 6);
  CHECK_THROWS_AS(fit_grouped(g, FamilyTag::weibull, GroupedMethod::ml), domain_error);
  CHECK_THROWS_AS(fit_grouped(g, FamilyTag::gamma, GroupedMethod::ml,
                              ParamVector{1.0, 1.0, 0.0}),
                  domain_error);
  // location at/above the first boundary
  CHECK_THROWS_AS(fit_grouped(g, FamilyTag::weibull, GroupedMethod::ml,
                              ParamVector{2.0, 10.0, g.boundaries.front() + 1.0}),
                  domain_error);
  GroupedSample single;
  single.boundaries = {0.0, 1.0, 2.0};
  single.frequencies = {5.0, 0.0};
  CHECK_THROWS_AS(
      fit_grouped(single, FamilyTag::weibull, GroupedMethod::ml, ParamVector{1.0, 1.0, -1.0}),
      domain_error);
  CHECK(grouped_method_from_string("em") == GroupedMethod::em);
  CHECK_THROWS_AS(grouped_method_from_string("nope"), domain_error);
}
