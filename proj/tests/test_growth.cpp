#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include "difit/growth.hpp"
#include "difit/rng.hpp"

using namespace difit;

namespace {

struct Case {
  GrowthModel model;
  ParamVector truth;
};

const std::vector<Case>& cases() {
  static const std::vector<Case> c = {
      {GrowthModel::chapman_richards, {20.0, -100.0, 10.0}},
      {GrowthModel::gompertz, {25.0, 3.0, 0.1}},
      {GrowthModel::hossfeldiv, {30.0, 0.01, 2.0}},
      {GrowthModel::korf, {30.0, 5.0, 0.8}},
      {GrowthModel::logistic, {25.0, 8.0, 0.15}},
      {GrowthModel::prodan, {0.04, 1.0, 5.0}},
      {GrowthModel::ratkowsky, {30.0, 20.0, 5.0}},
      {GrowthModel::sibbesen, {5.0, 1.5, 0.3}},
      {GrowthModel::weibull, {25.0, 0.02, 1.3}},
  };
  return c;
}

void make_data(const Case& c, std::size_t n, double noise_sd, std::uint64_t seed,
               Sample& h, Sample& d) {
  RngStream rng(seed);
  h.clear();
  d.clear();
  for (std::size_t i = 0; i < n; ++i) {
    double di = 5.0 + 40.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    d.push_back(di);
    h.push_back(growth_height(c.model, c.truth, di) + noise_sd * rng.normal());
  }
}

ParamVector perturbed(const ParamVector& b, double f) {
  return {b[0] * f, b[1] * f, b[2] * f};
}

}  // namespace

TEST_CASE("analytic gradients match central differences for all nine models") {
  for (const auto& c : cases()) {
    for (double d : {6.0, 17.5, 41.0}) {
      auto g = growth_gradient(c.model, c.truth, d);
      for (int j = 0; j < 3; ++j) {
        double step = 1e-6 * (std::fabs(c.truth[j]) + 1e-3);
        ParamVector hi = c.truth, lo = c.truth;
        hi[j] += step;
        lo[j] -= step;
        double fd =
            (growth_height(c.model, hi, d) - growth_height(c.model, lo, d)) / (2.0 * step);
        INFO(growth_model_name(c.model) << " beta" << j + 1 << " d=" << d);
        CHECK(g[j] == Catch::Approx(fd).epsilon(1e-5).margin(1e-8));
      }
    }
  }
}

TEST_CASE("noise-free weibull growth data is recovered exactly") {
  Sample h, d;
  Case c{GrowthModel::weibull, {20.0, 0.05, 1.2}};
  make_data(c, 40, 0.0, 1, h, d);
  auto fit = fit_growth(h, d, c.model, {18.0, 0.04, 1.0});
  for (int j = 0; j < 3; ++j)
    CHECK(fit.estimate[j] == Catch::Approx(c.truth[j]).epsilon(1e-6));
  for (double r : fit.residuals) CHECK(std::fabs(r) < 1e-8);
  CHECK(fit.residual_std_error < 1e-7);
}

TEST_CASE("all nine models fit their own noisy data with vanishing gradient") {
  for (const auto& c : cases()) {
    Sample h, d;
    make_data(c, 60, 0.4, 99, h, d);
    INFO(growth_model_name(c.model));
    auto fit = fit_growth(h, d, c.model, perturbed(c.truth, 1.1));
    // gradient of RSS at the optimum
    for (int j = 0; j < 3; ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i)
        g += fit.residuals[i] * growth_gradient(c.model, fit.estimate, d[i])[j];
      CHECK(std::fabs(g) < 1e-6 * (1.0 + fit.rss));
    }
    // summary identities
    for (int j = 0; j < 3; ++j) {
      CHECK(fit.t_value[j] * fit.std_error[j] == Catch::Approx(fit.estimate[j]).epsilon(1e-12));
      CHECK(fit.std_error[j] == Catch::Approx(std::sqrt(fit.var_cov[j][j])).epsilon(1e-12));
      CHECK(fit.p_value[j] >= 0.0);
      CHECK(fit.p_value[j] <= 1.0);
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        CHECK(fit.var_cov[a][b] == Catch::Approx(fit.var_cov[b][a]).margin(1e-12));
    // residuals in input order
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(fit.residuals[i] ==
            Catch::Approx(h[i] - growth_height(c.model, fit.estimate, d[i])).margin(1e-12));
  }
}

TEST_CASE("covariance matches a finite-difference jacobian rebuild") {
  Case c{GrowthModel::weibull, {25.0, 0.02, 1.3}};
  Sample h, d;
  make_data(c, 58, 0.5, 7, h, d);
  auto fit = fit_growth(h, d, c.model, perturbed(c.truth, 0.9));
  const std::size_t n = d.size();
  std::vector<std::vector<double>> J(n, std::vector<double>(3));
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) {
      double step = 1e-6 * std::fabs(fit.estimate[j]);
      ParamVector hi = fit.estimate, lo = fit.estimate;
      hi[j] += step;
      lo[j] -= step;
      J[i][j] =
          (growth_height(c.model, hi, d[i]) - growth_height(c.model, lo, d[i])) / (2.0 * step);
    }
  std::vector<std::vector<double>> jtj(3, std::vector<double>(3, 0.0)), inv;
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) jtj[a][b] += J[i][a] * J[i][b];
  REQUIRE(optim::spd_inverse(jtj, inv));
  double sigma2 = fit.rss / (static_cast<double>(n) - 3.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(fit.var_cov[a][b] == Catch::Approx(sigma2 * inv[a][b]).epsilon(1e-3));
}

TEST_CASE("logistic fits are unit equivariant in the diameter scale") {
  Case c{GrowthModel::logistic, {25.0, 8.0, 0.15}};
  Sample h, d;
  make_data(c, 45, 0.3, 21, h, d);
  auto base = fit_growth(h, d, c.model, perturbed(c.truth, 1.05));
  double s = 2.5;
  Sample ds(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) ds[i] = s * d[i];
  auto scaled = fit_growth(h, ds, c.model, {base.estimate[0], base.estimate[1],
                                            base.estimate[2] / s});
  for (std::size_t i = 0; i < d.size(); ++i) {
    double hb = growth_height(c.model, base.estimate, d[i]);
    double hs = growth_height(c.model, scaled.estimate, ds[i]);
    CHECK(hb == Catch::Approx(hs).margin(1e-9));
  }
}

TEST_CASE("t distribution helper agrees with table values") {
  CHECK(special::student_t_cdf(0.0, 5.0) == Catch::Approx(0.5).margin(1e-12));
  CHECK(special::student_t_cdf(1.533, 4.0) == Catch::Approx(0.90).margin(1e-3));
  CHECK(special::student_t_cdf(2.776, 4.0) == Catch::Approx(0.975).margin(1e-3));
}

TEST_CASE("growth fitting rejects invalid input") {
  Sample h{10.0, 12.0, 14.0, 15.0};
  Sample d{5.0, 10.0, 15.0, 20.0};
  CHECK_THROWS_AS(fit_growth({10.0, 12.0}, d, GrowthModel::weibull, {20.0, 0.05, 1.2}),
                  domain_error);
  CHECK_THROWS_AS(fit_growth({10.0, 12.0, 13.0}, {5.0, 10.0, 15.0}, GrowthModel::weibull,
                             {20.0, 0.05, 1.2}),
                  domain_error);
  CHECK_THROWS_AS(fit_growth(h, {5.0, -1.0, 15.0, 20.0}, GrowthModel::weibull,
                             {20.0, 0.05, 1.2}),
                  domain_error);
  CHECK_THROWS_AS(fit_growth(h, d, GrowthModel::weibull, {20.0, 0.05}), domain_error);
  CHECK_THROWS_AS(growth_model_from_string("nope"), domain_error);
  CHECK(growth_model_from_string("hossfeldiv") == GrowthModel::hossfeldiv);
  // identical diameters give singular normal equations
  CHECK_THROWS_WITH(
      fit_growth({10.0, 11.0, 12.0, 13.0}, {10.0, 10.0, 10.0, 10.0}, GrowthModel::weibull,
                 {20.0, 0.05, 1.2}),
      Catch::Matchers::ContainsSubstring("beta"));
}
