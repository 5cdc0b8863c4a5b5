#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "difit/bayes.hpp"
#include "difit/distributions.hpp"
#include "difit/rng.hpp"

using namespace difit;

namespace {

Sample simulate_weibull3(double alpha, double beta, double mu, std::size_t n,
                         std::uint64_t seed) {
  RngStream rng(seed);
  return sample(FamilyTag::weibull, {alpha, beta, mu}, n, rng);
}

Sample simulate_jsb(double delta, double gamma, double lambda, double xi, std::size_t n,
                    std::uint64_t seed) {
  RngStream rng(seed);
  return sample(FamilyTag::jsb, {delta, gamma, lambda, xi}, n, rng);
}

}  // namespace

TEST_CASE("weibull sampler is deterministic in the seed") {
  auto x = simulate_weibull3(1.8, 6.0, 2.0, 200, 11);
  McmcConfig cfg{600, 300, 5};
  auto a = fit_bayes_weibull(x, cfg);
  auto b = fit_bayes_weibull(x, cfg);
  REQUIRE(a.traces.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    REQUIRE(a.traces[j].size() == 300);
    for (std::size_t i = 0; i < a.traces[j].size(); ++i)
      CHECK(a.traces[j][i] == b.traces[j][i]);
    CHECK(a.estimate[j] == b.estimate[j]);
  }
  auto c = fit_bayes_weibull(x, {600, 300, 6});
  bool differs = false;
  for (std::size_t j = 0; j < 3; ++j)
    if (a.estimate[j] != c.estimate[j]) differs = true;
  CHECK(differs);
}

TEST_CASE("weibull sampler recovers simulated parameters") {
  auto x = simulate_weibull3(2.0, 10.0, 5.0, 10000, 42);
  auto fit = fit_bayes_weibull(x, {4000, 3000, 17});
  CHECK(fit.estimate[0] == Catch::Approx(2.0).epsilon(0.05));
  CHECK(fit.estimate[1] == Catch::Approx(10.0).epsilon(0.05));
  CHECK(fit.estimate[2] == Catch::Approx(5.0).epsilon(0.05));
  // every retained draw stays inside the parameter domain
  double xmin = stats::min(x);
  for (std::size_t i = 0; i < fit.traces[0].size(); ++i) {
    REQUIRE(fit.traces[0][i] > 0.0);
    REQUIRE(fit.traces[1][i] > 0.0);
    REQUIRE(fit.traces[2][i] < xmin);
  }
  // likelihood at the estimate matches a direct recomputation
  double ll = 0.0;
  for (double v : x) ll += log_pdf(FamilyTag::weibull, fit.estimate, v);
  CHECK(fit.measures.log_likelihood == Catch::Approx(ll).epsilon(1e-12));
  CHECK_FALSE(fit.measures.aic.has_value());
  CHECK_FALSE(fit.measures.bic.has_value());
}

TEST_CASE("burn-in boundary leaves a single retained draw") {
  auto x = simulate_weibull3(1.5, 4.0, 1.0, 60, 3);
  auto fit = fit_bayes_weibull(x, {500, 499, 9});
  for (std::size_t j = 0; j < 3; ++j) {
    REQUIRE(fit.traces[j].size() == 1);
    CHECK(fit.estimate[j] == fit.traces[j][0]);
  }
}

TEST_CASE("weibull sampler validates its input") {
  CHECK_THROWS_AS(fit_bayes_weibull({1.0, 2.0, 3.0}), domain_error);
  Sample neg(20, 1.0);
  neg[3] = -0.5;
  CHECK_THROWS_AS(fit_bayes_weibull(neg), domain_error);
  Sample flat(20, 2.5);
  CHECK_THROWS_AS(fit_bayes_weibull(flat), domain_error);
  auto x = simulate_weibull3(1.5, 4.0, 1.0, 60, 3);
  CHECK_THROWS_AS(fit_bayes_weibull(x, {100, 100, 1}), domain_error);
  CHECK_THROWS_AS(fit_bayes_weibull(x, {100, 0, 1}), domain_error);
}

TEST_CASE("jsb sampler is deterministic and keeps draws in-domain") {
  auto x = simulate_jsb(1.2, 0.3, 12.0, 1.0, 300, 8);
  McmcConfig cfg{800, 400, 4};
  auto a = fit_bayes_jsb(x, cfg);
  auto b = fit_bayes_jsb(x, cfg);
  REQUIRE(a.traces.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) {
    REQUIRE(a.traces[j].size() == 400);
    for (std::size_t i = 0; i < a.traces[j].size(); ++i)
      CHECK(a.traces[j][i] == b.traces[j][i]);
  }
  double xmin = stats::min(x), xmax = x[0];
  for (double v : x) xmax = std::max(xmax, v);
  for (std::size_t i = 0; i < a.traces[0].size(); ++i) {
    REQUIRE(a.traces[0][i] > 0.0);                        // delta
    REQUIRE(a.traces[2][i] > 0.0);                        // lambda
    REQUIRE(a.traces[3][i] < xmin);                       // xi below the data
    REQUIRE(a.traces[3][i] + a.traces[2][i] > xmax);      // support covers the data
  }
}

TEST_CASE("jsb sampler recovers simulated parameters") {
  auto x = simulate_jsb(1.0, 0.0, 10.0, 0.0, 10000, 101);
  auto fit = fit_bayes_jsb(x, {4000, 3000, 23});
  CHECK(fit.estimate[0] == Catch::Approx(1.0).epsilon(0.05));
  CHECK(std::fabs(fit.estimate[1]) < 0.10);
  CHECK(fit.estimate[2] == Catch::Approx(10.0).epsilon(0.10));
  CHECK(std::fabs(fit.estimate[3]) < 1.0);
}

TEST_CASE("jsb conditional draws are consistent under reparameterization") {
  // pre-transform the data to the unit interval; fitting with (lambda, xi)
  // pinned to (1, 0) must recover the normal parameters of the logit scale
  auto x = simulate_jsb(1.3, -0.4, 1.0, 0.0, 4000, 55);
  auto fit = fit_bayes_jsb(x, {3000, 2000, 77}, std::make_pair(1.0, 0.0));
  CHECK(fit.estimate[0] == Catch::Approx(1.3).epsilon(0.05));
  CHECK(fit.estimate[1] == Catch::Approx(-0.4).margin(0.1));
  for (std::size_t i = 0; i < fit.traces[2].size(); ++i) {
    CHECK(fit.traces[2][i] == 1.0);
    CHECK(fit.traces[3][i] == 0.0);
  }
  // the pinned fit matches a fresh scale-and-shift of the same draw stream
  Sample y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i] + 2.0;
  auto moved = fit_bayes_jsb(y, {3000, 2000, 77}, std::make_pair(3.0, 2.0));
  CHECK(moved.estimate[0] == Catch::Approx(fit.estimate[0]).epsilon(1e-9));
  CHECK(moved.estimate[1] == Catch::Approx(fit.estimate[1]).epsilon(1e-9));
}

TEST_CASE("jsb sampler validates its input") {
  auto x = simulate_jsb(1.0, 0.0, 10.0, 0.0, 50, 2);
  CHECK_THROWS_AS(fit_bayes_jsb({0.1, 0.2, 0.3}), domain_error);
  Sample flat(20, 0.5);
  CHECK_THROWS_AS(fit_bayes_jsb(flat), domain_error);
  // pinned bounds that exclude the data are rejected up front
  CHECK_THROWS_AS(fit_bayes_jsb(x, {400, 200, 1}, std::make_pair(0.5, 0.0)), domain_error);
}
