#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pdmp/rngkit.hpp"

using pdmp::RngStream;

TEST_CASE("standard normal moments over a million draws") {
  RngStream rng(3, 0);
  std::vector<double> x(1'000'000);
  for (double& v : x) v = pdmp::standard_normal(rng);
  const auto ms = oracle::mean_se(x);
  CHECK(std::abs(ms.mean) < 4e-3);
  double var = 0.0;
  for (double v : x) var += (v - ms.mean) * (v - ms.mean);
  var /= static_cast<double>(x.size() - 1);
  CHECK(std::abs(var - 1.0) < 6e-3);
}

TEST_CASE("a stream is a pure function of (seed, stream id)") {
  RngStream a(42, 0), b(42, 0), c(42, 1), e(43, 0);
  const double first = pdmp::standard_normal(a);
  CHECK(first == pdmp::standard_normal(b));
  CHECK(first != pdmp::standard_normal(c));
  CHECK(first != pdmp::standard_normal(e));
}

TEST_CASE("neighbouring streams are uncorrelated") {
  RngStream a(7, 0), b(7, 1);
  std::vector<double> x(100'000), y(100'000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = a.normal();
    y[i] = b.normal();
  }
  CHECK(std::abs(oracle::correlation(x, y)) < 4.0 / std::sqrt(1e5));
}

TEST_CASE("exponential draws") {
  RngStream rng(5, 0);
  const int n = 1'000'000;

  SUBCASE("rate 2 has mean 1/2") {
    std::vector<double> x(n);
    for (double& v : x) v = pdmp::exponential(rng, 2.0);
    const auto ms = oracle::mean_se(x);
    CHECK(std::abs(ms.mean - 0.5) < 3 * ms.se);
  }
  SUBCASE("rate 1 tail at 1 is 1/e") {
    int above = 0;
    for (int i = 0; i < n; ++i) above += pdmp::exponential(rng, 1.0) > 1.0;
    const double p = std::exp(-1.0);
    CHECK(std::abs(above / double(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
  }
  SUBCASE("rate 1.424 has mean 1/1.424") {
    std::vector<double> x(n);
    for (double& v : x) v = pdmp::exponential(rng, 1.424);
    const auto ms = oracle::mean_se(x);
    CHECK(std::abs(ms.mean - 0.702247191) < 4 * ms.se);
  }
  SUBCASE("nonpositive rates are rejected") {
    CHECK_THROWS_AS(pdmp::exponential(rng, 0.0), std::domain_error);
    CHECK_THROWS_AS(pdmp::exponential(rng, -1.0), std::domain_error);
  }
}

TEST_CASE("uniform sphere") {
  RngStream rng(9, 0);
  SUBCASE("unit norm") {
    for (int d : {1, 2, 3, 17, 1000}) {
      const auto v = pdmp::uniform_sphere(rng, d);
      double n2 = 0.0;
      for (double x : v) n2 += x * x;
      CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-12);
    }
  }
  SUBCASE("d = 1 is a fair sign") {
    const int n = 100'000;
    int plus = 0;
    for (int i = 0; i < n; ++i) {
      const double x = pdmp::uniform_sphere(rng, 1)[0];
      REQUIRE((x == 1.0 || x == -1.0));
      plus += x > 0;
    }
    CHECK(std::abs(plus / double(n) - 0.5) < 4 * 0.5 / std::sqrt(n));
  }
  SUBCASE("d = 3 first coordinate is centred") {
    std::vector<double> x(1'000'000);
    for (double& v : x) v = pdmp::uniform_sphere(rng, 3)[0];
    const auto ms = oracle::mean_se(x);
    CHECK(std::abs(ms.mean) < 4 * ms.se);
  }
  SUBCASE("d < 1 is rejected") { CHECK_THROWS_AS(pdmp::uniform_sphere(rng, 0), std::domain_error); }
}

TEST_CASE("sphere projection moments") {
  // Reference values from the Beta-function closed form evaluated at 30
  // digits with mpmath.
  CHECK(pdmp::sphere_projection_moment(2, 1) == doctest::Approx(0.90031631615710607).epsilon(1e-13));
  CHECK(pdmp::sphere_projection_moment(8, 3) == doctest::Approx(1.4633712821347248).epsilon(1e-13));
  CHECK(pdmp::sphere_projection_moment(32, 1) == doctest::Approx(0.80414142564814978).epsilon(1e-13));

  for (int d : {2, 3, 10, 1000, 1'000'000}) {
    CHECK(pdmp::sphere_projection_moment(d, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pdmp::sphere_projection_moment(d, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Large d approaches the Gaussian fourth moment 3.
  CHECK(std::abs(pdmp::sphere_projection_moment(1'000'000, 4.0) - 3.0) < 1e-4);
  // Large d, first absolute moment approaches sqrt(2/pi).
  CHECK(std::abs(pdmp::sphere_projection_moment(10'000'000, 1.0) - std::sqrt(2.0 / M_PI)) < 1e-7);

  CHECK_THROWS_AS(pdmp::sphere_projection_moment(1, 2.0), std::domain_error);
  CHECK_THROWS_AS(pdmp::sphere_projection_moment(4, -1.0), std::domain_error);
  CHECK_THROWS_AS(pdmp::sphere_projection_moment(4, -2.5), std::domain_error);
}

TEST_CASE("sphere projection moments agree with Monte Carlo") {
  RngStream rng(21, 0);
  const int n = 100'000;
  for (int d : {2, 8, 32}) {
    std::vector<double> proj(n);
    for (double& p : proj) p = std::sqrt(double(d)) * std::abs(pdmp::uniform_sphere(rng, d)[0]);
    for (double alpha : {1.0, 2.0, 3.0, 4.0}) {
      std::vector<double> pw(n);
      for (int i = 0; i < n; ++i) pw[i] = std::pow(proj[i], alpha);
      const auto ms = oracle::mean_se(pw);
      INFO("d = " << d << ", alpha = " << alpha);
      CHECK(std::abs(ms.mean - pdmp::sphere_projection_moment(d, alpha)) < 4 * ms.se);
    }
  }
}
