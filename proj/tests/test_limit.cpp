#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pdmp/analysis.hpp"
#include "pdmp/limit.hpp"

using namespace pdmp;
using namespace pdmp::limit;

TEST_CASE("T from a negative start drifts deterministically") {
  RngStream rng(1, 0);
  const auto path = simulate_T(-5.0, 4.9, rng);
  CHECK(path.jump_count() == 0);
  CHECK(path.value_at(4.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(path.integral(4.0) == doctest::Approx(-5.0 * 4.0 + 8.0).epsilon(1e-14));
}

TEST_CASE("T jumps negate the pre-jump value") {
  RngStream rng(2, 0);
  const auto path = simulate_T(standard_normal(rng), 200.0, rng);
  REQUIRE(path.jump_count() > 20);
  const LimitEvent* prev = &path.initial;
  for (const auto& e : path.events) {
    const double before = prev->value + (e.time - prev->time);
    REQUIRE(e.value == doctest::Approx(-before).epsilon(1e-12));
    // Flips only happen from the positive half-line.
    REQUIRE(before > 0.0);
    prev = &e;
  }
}

TEST_CASE("stationary flip and event counts") {
  const double T = 20.0, phi0 = 1.0 / std::sqrt(2 * M_PI);
  const int n = 20'000;
  SUBCASE("T") {
    std::vector<double> c(n);
    for (int p = 0; p < n; ++p) {
      RngStream rng(3, p);
      c[p] = double(simulate_T(standard_normal(rng), T, rng).jump_count());
    }
    const auto ms = oracle::mean_se(c);
    CHECK(std::abs(ms.mean - T * phi0) < 4 * ms.se);
  }
  SUBCASE("S^B") {
    const double rho = 1.3;
    std::vector<double> c(n);
    for (int p = 0; p < n; ++p) {
      RngStream rng(4, p);
      c[p] = double(simulate_SB(standard_normal(rng), rho, T, rng).jump_count());
    }
    const auto ms = oracle::mean_se(c);
    CHECK(std::abs(ms.mean - T * (phi0 + rho)) < 4 * ms.se);
  }
}

TEST_CASE("S^B with rho = 0 is T, path for path") {
  for (int p = 0; p < 50; ++p) {
    RngStream a(5, p), b(5, p);
    const auto t = simulate_T(0.3, 30.0, a);
    const auto s = simulate_SB(0.3, 0.0, 30.0, b);
    REQUIRE(t.jump_count() == s.jump_count());
    for (std::size_t i = 0; i < t.events.size(); ++i) {
      REQUIRE(t.events[i].time == s.events[i].time);
      REQUIRE(t.events[i].value == s.events[i].value);
      REQUIRE(!s.events[i].refresh);
    }
  }
}

TEST_CASE("stationary marginals of the limit processes") {
  const int n = 10'000;
  std::vector<double> sb(n), zz(n);
  for (int p = 0; p < n; ++p) {
    RngStream rng(6, p);
    sb[p] = simulate_SB(standard_normal(rng), 0.7, 3.0, rng).value_at(3.0);
    zz[p] = simulate_zigzag1d(standard_normal(rng), random_sign(rng), 7.0, rng).value_at(7.0);
  }
  CHECK(analysis::ks_test(sb, analysis::NormalTarget::N01) > 0.01);
  CHECK(analysis::ks_test(zz, analysis::NormalTarget::N01) > 0.01);
}

TEST_CASE("1-D zigzag time average of xi is near zero") {
  RngStream rng(7, 0);
  const double H = 1e4;
  const auto path = simulate_zigzag1d(standard_normal(rng), random_sign(rng), H, rng);
  CHECK(std::abs(path.integral(H) / H) < 0.05);
}

TEST_CASE("Ito identities hold pathwise") {
  for (int p = 0; p < 200; ++p) {
    RngStream rng(8, p);
    const auto t = simulate_T(standard_normal(rng), 10.0, rng);
    const auto r = ito_residuals(t);
    REQUIRE(r.square < 1e-9);
    REQUIRE(r.absolute < 1e-9);
  }
}

TEST_CASE("simulate_ou") {
  const auto grid = uniform_grid(0.0, 1.0, 0.5);
  const int n = 100'000;

  SUBCASE("autocorrelation e^{-theta tau}") {
    std::vector<double> prod(n);
    for (int p = 0; p < n; ++p) {
      RngStream rng(9, p);
      // theta = 1, sigma = sqrt(2): unit stationary variance.
      const auto s = simulate_ou(1.0, std::sqrt(2.0), standard_normal(rng), grid, rng);
      prod[p] = s.value(0) * s.value(2);
    }
    const auto ms = oracle::mean_se(prod);
    CHECK(std::abs(ms.mean - std::exp(-1.0)) < 4 * ms.se);
  }
  SUBCASE("stationary variances") {
    struct Case {
      double theta, sigma, var;
    };
    // theta = sigma^2 / 4 gives variance 2; theta = 1/rho, sigma^2 = 2/rho gives 1.
    for (const Case c : {Case{0.25, 1.0, 2.0}, Case{0.5, 1.0, 1.0}}) {
      std::vector<double> sq(n);
      for (int p = 0; p < n; ++p) {
        RngStream rng(10, p);
        const double x = simulate_ou(c.theta, c.sigma, 0.0, std::vector<double>{0.0, 40.0}, rng).value(1);
        sq[p] = x * x;
      }
      const auto ms = oracle::mean_se(sq);
      CHECK(std::abs(ms.mean - c.var) < 4 * ms.se);
    }
  }
  SUBCASE("invalid parameters") {
    RngStream rng(11, 0);
    CHECK_THROWS_AS(simulate_ou(0.0, 1.0, 0.0, grid, rng), std::domain_error);
    CHECK_THROWS_AS(simulate_ou(1.0, -1.0, 0.0, grid, rng), std::domain_error);
  }
}

TEST_CASE("drift conditions") {
  CHECK(drift_condition_check({LimitKind::SB, 1.0}, 10.0) == doctest::Approx(-79.0 / 101.0).epsilon(1e-14));
  CHECK(drift_condition_check({LimitKind::T, 0.0}, 5.0) == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(drift_condition_check({LimitKind::T, 0.0}, -3.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(drift_condition_check({LimitKind::T, 0.0}, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  // (2 - x) / 2 beyond the small set.
  for (double x : {4.5, 8.0, 20.0})
    CHECK(drift_condition_check({LimitKind::T, 0.0}, x) == doctest::Approx((2.0 - x) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(drift_condition_check({LimitKind::T, 0.0}, 2.0), std::domain_error);
  CHECK_THROWS_AS(drift_condition_check({LimitKind::T, 0.0}, 4.0), std::domain_error);
}

TEST_CASE("limit generators have zero stationary mean") {
  RngStream rng(12, 0);
  const int n = 100'000;
  for (const char* tag : {"x", "x2", "x3", "tanh"}) {
    const auto fn = limit_test_function(tag);
    std::vector<double> g(n), h(n);
    for (int i = 0; i < n; ++i) {
      const double x = standard_normal(rng);
      g[i] = generator_T(fn, x);
      h[i] = generator_SB(fn, 1.5, x);
    }
    const auto mg = oracle::mean_se(g), mh = oracle::mean_se(h);
    INFO(tag);
    CHECK(std::abs(mg.mean) < 4 * mg.se);
    CHECK(std::abs(mh.mean) < 4 * mh.se);
  }
  CHECK_THROWS_AS(limit_test_function("exp"), CatalogError);
}
