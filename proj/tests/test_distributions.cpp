#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "difit/distributions.hpp"
#include "oracle.hpp"

using namespace difit;

namespace {

// Three valid parameter sets per family for property checks.
const std::map<FamilyTag, std::vector<ParamVector>>& property_params() {
  static const std::map<FamilyTag, std::vector<ParamVector>> m = {
      {FamilyTag::weibull, {{2.0, 5.0}, {0.8, 1.5}, {1.3, 18.6, 12.4}}},
      {FamilyTag::gamma, {{2.0, 1.5}, {0.7, 3.0}, {4.0, 2.0, 1.0}}},
      {FamilyTag::ge, {{2.0, 0.5}, {0.9, 1.2}, {3.0, 0.8, 2.0}}},
      {FamilyTag::birnbaum_saunders, {{0.5, 2.0}, {1.5, 1.0}, {0.62, 8.66, 8.45}}},
      {FamilyTag::burrxii, {{2.0, 3.0}, {1.5, 0.8}, {3.0, 1.0}}},
      {FamilyTag::chen, {{0.7, 1.0}, {1.2, 0.5}, {0.5, 2.0}}},
      {FamilyTag::fisher, {{4.0, 6.0}, {3.0, 8.0}, {10.0, 5.0}}},
      {FamilyTag::frechet, {{3.0, 2.0}, {1.5, 1.0}, {2.5, 10.0}}},
      {FamilyTag::gompertz, {{0.5, 0.2}, {1.0, 1.0}, {0.1, 0.8}}},
      {FamilyTag::jsb, {{1.0, 0.0, 4.0, 0.0}, {0.69, 0.41, 43.5, 11.7}, {2.0, -0.5, 10.0, 1.0}}},
      {FamilyTag::log_logistic, {{3.0, 2.0}, {1.5, 1.0}, {5.0, 10.0}}},
      {FamilyTag::log_normal, {{0.0, 1.0}, {2.6, 0.3}, {-1.0, 0.5}}},
      {FamilyTag::lomax, {{0.5, 3.0}, {1.0, 2.0}, {2.0, 4.0}}},
      {FamilyTag::skew_normal, {{0.0, 1.0, 2.0}, {12.1, 1.5, 4.9}, {5.0, 2.0, -3.0}}},
  };
  return m;
}

double clip_upper(FamilyTag f, const ParamVector& p) {
  double hi = support_upper(f, p);
  if (std::isinf(hi)) return quantile(f, p, 1.0 - 1e-13);
  return hi;
}

}  // namespace

TEST_CASE("weibull pdf reduces to the exponential at alpha = 1") {
  CHECK(pdf(FamilyTag::weibull, {1.0, 2.0, 0.0}, 0.0) == Catch::Approx(0.5));
}

TEST_CASE("jsb pdf at the symmetric midpoint") {
  // delta=1, gamma=0, lambda=4, xi=0 at x=2: log term vanishes, (x)(4-x)=4
  CHECK(pdf(FamilyTag::jsb, {1.0, 0.0, 4.0, 0.0}, 2.0) ==
        Catch::Approx(1.0 / std::sqrt(2.0 * special::pi)).epsilon(1e-10));
}

TEST_CASE("gamma pdf matches an independent formula evaluation") {
  double a = 2.0, b = 1.5, x = 3.0;
  double expected = std::pow(x, a - 1.0) * std::exp(-x / b) / (std::pow(b, a) * std::tgamma(a));
  CHECK(pdf(FamilyTag::gamma, {a, b}, x) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("weibull cdf at the scale point is 1 - 1/e for any shape") {
  for (double a : {0.5, 1.0, 2.0, 7.3}) {
    CHECK(cdf(FamilyTag::weibull, {a, 3.0, 1.0}, 4.0) ==
          Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  }
}

TEST_CASE("cdf limits at the support bounds") {
  for (const auto& [fam, sets] : property_params()) {
    for (const auto& p : sets) {
      double lo = support_lower(fam, p);
      double hi = support_upper(fam, p);
      double a = std::isinf(lo) ? -1e8 : lo;
      double b = std::isinf(hi) ? 1e10 : hi;
      INFO(family_name(fam));
      CHECK(cdf(fam, p, a) <= 1e-6);
      CHECK(cdf(fam, p, b) >= 1.0 - 1e-6);
    }
  }
}

TEST_CASE("fisher cdf matches quadrature of the pdf") {
  ParamVector p{4.0, 6.0};
  double q = oracle::integrate([&](double x) { return pdf(FamilyTag::fisher, p, x); }, 0.0, 1.0);
  CHECK(cdf(FamilyTag::fisher, p, 1.0) == Catch::Approx(q).epsilon(1e-8));
}

TEST_CASE("weibull quantile inverts the scale-point identity") {
  CHECK(quantile(FamilyTag::weibull, {2.0, 5.0, 1.0}, 1.0 - std::exp(-1.0)) ==
        Catch::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("log-normal median is exp(alpha)") {
  CHECK(quantile(FamilyTag::log_normal, {0.0, 1.0}, 0.5) == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cdf/quantile roundtrip across all families") {
  for (const auto& [fam, sets] : property_params()) {
    for (const auto& p : sets) {
      for (double prob : {0.01, 0.5, 0.99}) {
        INFO(family_name(fam) << " p=" << prob);
        double x = quantile(fam, p, prob);
        CHECK(cdf(fam, p, x) == Catch::Approx(prob).margin(1e-8));
        if (prob > 0.0 && prob < 1.0) {
          double u = cdf(fam, p, x);
          CHECK(quantile(fam, p, u) == Catch::Approx(x).margin(1e-6 * (1.0 + std::fabs(x))));
        }
      }
    }
  }
}

TEST_CASE("pdf integrates to one over the support") {
  for (const auto& [fam, sets] : property_params()) {
    for (const auto& p : sets) {
      // integrate in quantile segments so long tails and boundary spikes are
      // resolved; quantiles only locate the segment edges, the mass itself
      // comes from direct integration of the pdf
      std::vector<double> probs{1e-9, 1e-4, 0.01, 0.1, 0.3, 0.5, 0.7,
                                0.9,  0.99, 1e-4, 1e-9};
      std::vector<double> edges;
      for (std::size_t i = 0; i < 9; ++i) edges.push_back(quantile(fam, p, probs[i]));
      edges.push_back(quantile(fam, p, 1.0 - 1e-4));
      edges.push_back(quantile(fam, p, 1.0 - 1e-9));
      double total = 2e-9;  // unresolved tail mass below/above the end segments
      for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        total += oracle::integrate([&](double x) { return pdf(fam, p, x); }, edges[i],
                                   edges[i + 1], 1e-10);
      INFO(family_name(fam));
      CHECK(total == Catch::Approx(1.0).margin(1e-6));
    }
  }
}

TEST_CASE("cdf is nondecreasing on a 1000-point grid") {
  for (const auto& [fam, sets] : property_params()) {
    const auto& p = sets[0];
    double a = quantile(fam, p, 1e-6), b = quantile(fam, p, 1.0 - 1e-6);
    double prev = -1.0;
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
      double x = a + (b - a) * i / 999.0;
      double u = cdf(fam, p, x);
      if (u < prev - 1e-14) ok = false;
      prev = u;
    }
    INFO(family_name(fam));
    CHECK(ok);
  }
}

TEST_CASE("sample moments match the weibull mean formula") {
  RngStream rng(20240817);
  auto x = sample(FamilyTag::weibull, {2.0, 5.0, 0.0}, 100000, rng);
  double expected = 5.0 * std::tgamma(1.5);
  CHECK(oracle::mean(x) == Catch::Approx(expected).epsilon(0.01));
}

TEST_CASE("samples are self-consistent with the cdf (KS)") {
  for (const auto& [fam, sets] : property_params()) {
    const auto& p = sets[0];
    RngStream rng(991);
    auto x = sample(fam, p, 10000, rng);
    double ks = oracle::ks_statistic(x, [&](double v) { return cdf(fam, p, v); });
    INFO(family_name(fam));
    CHECK(ks < 0.02);
  }
}

TEST_CASE("sample/pdf chi-square agreement in 20 equiprobable classes") {
  // critical value chi2(0.999, df=19) = 43.82
  for (const auto& [fam, sets] : property_params()) {
    const auto& p = sets[0];
    RngStream rng(7121);
    auto x = sample(fam, p, 10000, rng);
    std::vector<int> counts(20, 0);
    for (double v : x) {
      double u = cdf(fam, p, v);
      int c = std::min(19, static_cast<int>(u * 20.0));
      counts[c]++;
    }
    double stat = 0.0;
    for (int c : counts) stat += (c - 500.0) * (c - 500.0) / 500.0;
    INFO(family_name(fam) << " chi2=" << stat);
    CHECK(stat < 43.82);
  }
}

TEST_CASE("identical seeds give identical samples") {
  RngStream a(42), b(42);
  auto xa = sample(FamilyTag::gamma, {2.0, 3.0}, 100, a);
  auto xb = sample(FamilyTag::gamma, {2.0, 3.0}, 100, b);
  CHECK(xa == xb);
}

TEST_CASE("invalid parameters raise a domain error naming the field") {
  CHECK_THROWS_WITH(pdf(FamilyTag::weibull, {-1.0, 2.0}, 1.0),
                    Catch::Matchers::ContainsSubstring("alpha"));
  CHECK_THROWS_WITH(pdf(FamilyTag::weibull, {1.0, -2.0}, 1.0),
                    Catch::Matchers::ContainsSubstring("beta"));
  CHECK_THROWS_WITH(pdf(FamilyTag::jsb, {1.0, 0.0, -4.0, 0.0}, 1.0),
                    Catch::Matchers::ContainsSubstring("lambda"));
  CHECK_THROWS_AS(quantile(FamilyTag::weibull, {1.0, 1.0}, 1.5), domain_error);
  CHECK(pdf(FamilyTag::weibull, {2.0, 1.0, 3.0}, 2.0) == 0.0);  // out of support, not an error
}
