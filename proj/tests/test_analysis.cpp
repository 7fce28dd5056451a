#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pdmp/analysis.hpp"
#include "pdmp/limit.hpp"

using namespace pdmp;
using namespace pdmp::analysis;

namespace {

// A noiseless kernel estimate built from a closed form.
KernelEstimate synthetic(const std::function<double(double)>& K, std::vector<double> grid) {
  KernelEstimate k;
  k.grid = std::move(grid);
  for (double t : k.grid) {
    k.mean.push_back(K(t));
    k.se.push_back(0.0);
  }
  k.n_paths = 1;
  return k;
}

double expo(double t) { return std::exp(-t); }

}  // namespace

TEST_CASE("kernel estimate basics") {
  const auto grid = default_kernel_grid();
  const auto k = estimate_kernel(grid, 40'000, 1);
  CHECK(k.grid.front() == 0.0);
  CHECK(k.t_max() == doctest::Approx(12.0));
  CHECK(std::abs(k.mean[0] - 1.0) < 4 * k.se[0]);
  const auto integral = kernel_integral(k);
  CHECK(std::abs(integral.value) < 4 * integral.se);
  // K dips below zero before decaying.
  CHECK(k.mean[k.index_of(2.0)] < 0.0);
  CHECK_THROWS_AS(k.index_of(0.123), std::out_of_range);

  CHECK_THROWS_AS(estimate_kernel(grid, 99, 1), std::domain_error);
  CHECK_THROWS_AS(estimate_kernel(std::vector<double>{0.1, 0.2}, 1000, 1), std::domain_error);
}

TEST_CASE("standard errors shrink like 1/sqrt(n)") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto a = estimate_kernel(grid, 20'000, 2);
  const auto b = estimate_kernel(grid, 40'000, 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ratio = b.se[i] / a.se[i];
    INFO("t = " << grid[i]);
    CHECK(ratio > 0.8 / std::sqrt(2.0));
    CHECK(ratio < 1.2 / std::sqrt(2.0));
  }
}

TEST_CASE("kernel does not depend on the base time") {
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  const auto a = estimate_kernel(grid, 40'000, 4, Execution::parallel, KernelMethod::plain, 0.0);
  const auto b = estimate_kernel(grid, 40'000, 5, Execution::parallel, KernelMethod::plain, 3.0);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(a.mean[i] - b.mean[i]) < 4 * std::hypot(a.se[i], b.se[i]));
}

TEST_CASE("plain and compensated estimators agree") {
  const std::vector<double> grid{0.0, 0.01, 0.02, 0.5, 1.0};
  const auto a = estimate_kernel(grid, 40'000, 6, Execution::parallel, KernelMethod::plain);
  const auto b = estimate_kernel(grid, 40'000, 7, Execution::parallel, KernelMethod::compensated);
  CHECK(b.mean[0] == 1.0);
  CHECK(b.se[0] == 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(std::abs(a.mean[i] - b.mean[i]) < 4 * std::hypot(a.se[i], b.se[i]));
  // The compensated estimator is far less noisy at small lags.
  CHECK(b.se[1] < 0.2 * a.se[1]);
}

TEST_CASE("derivative checks on synthetic kernels") {
  const auto fine = uniform_grid(0.0, 12.0, 0.01);
  const auto ou = synthetic(expo, fine);

  SUBCASE("exponential kernel has no non-Markov witness") {
    // slope^2 - curvature with slope (e^{-0.01} - 1)/0.01 and curvature
    // (e^{-0.04} - 2 e^{-0.02} + 1)/0.0004, both within O(h) of 1.
    const double slope = std::expm1(-0.01) / 0.01;
    const double curv = (std::exp(-0.04) - 2 * std::exp(-0.02) + 1) / 0.0004;
    const auto w = non_markov_witness(ou);
    CHECK(w.value == doctest::Approx(slope * slope - curv).epsilon(1e-9));
    CHECK(std::abs(w.value) < 0.02);
    CHECK(w.se == 0.0);
  }
  SUBCASE("second difference of e^{-t} approaches 1") {
    CHECK(kernel_second_derivative_check(ou).value == doctest::Approx(1.0).epsilon(0.03));
    const auto coarse = synthetic(expo, uniform_grid(0.0, 12.0, 0.1));
    CHECK_THROWS_AS(kernel_second_derivative_check(coarse), std::domain_error);
    CHECK_THROWS_AS(kernel_second_derivative_check(ou, 0.05), std::domain_error);
  }
  SUBCASE("increment variance slope of e^{-t} is 2") {
    const std::vector<double> hs{0.01, 0.02, 0.03, 0.04, 0.05};
    // The quadratic fit leaves only the cubic term h^3/3 of 2 - 2e^{-h}.
    CHECK(std::abs(increment_variance_check(ou, hs).value - 2.0) < 0.005);
    for (double h : hs) {
      const std::vector<double> one{h};
      CHECK(increment_variance_check(ou, one).value ==
            doctest::Approx(-2.0 * kernel_first_derivative(ou, h).value).epsilon(1e-12));
    }
  }
  SUBCASE("geometric envelope of e^{-t}") {
    const auto env = fit_geometric_envelope(ou);
    CHECK(env.gamma == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK(env.C == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("exponential weights integrate piecewise-linear functions exactly") {
  // K_lin = 1 - s on [0, 1], zero afterwards. By hand:
  // int_0^1 e^{-rho s}(1 - s) ds = 1/rho - (1 - e^{-rho})/rho^2.
  for (double step : {1e-4, 0.013, 0.25}) {
    auto grid = uniform_grid(0.0, 3.0, step);
    grid.push_back(1.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());
    for (double rho : {0.05, 1.0, 7.0}) {
      const auto w = exponential_weights(grid, rho);
      double acc = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) acc += w[i] * std::max(0.0, 1.0 - grid[i]);
      const double exact = 1.0 / rho - -std::expm1(-rho) / (rho * rho);
      INFO("step " << step << ", rho " << rho);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-11));
    }
  }
}

TEST_CASE("sigma^2 and its maximiser on closed-form kernels") {
  const auto grid = uniform_grid(0.0, 30.0, 0.005);

  SUBCASE("interior maximum") {
    // K = 2e^{-2t} - e^{-t}: K(0) = 1, int K = 0.
    // sigma^2 = 8 (2/(rho+2) - 1/(rho+1)); setting the derivative to zero,
    // (rho+2)^2 = 2(rho+1)^2, so rho* = sqrt(2).
    const auto k = synthetic([](double t) { return 2 * std::exp(-2 * t) - std::exp(-t); }, grid);
    auto closed = [](double r) { return 8.0 * (2.0 / (r + 2.0) - 1.0 / (r + 1.0)); };
    for (double rho : {0.1, 1.0, 1.4142, 5.0}) {
      const auto s = sigma2_from_kernel(k, rho);
      CHECK(s.value == doctest::Approx(closed(rho)).epsilon(1e-4));
      // Internal identity: the value is 8 times the exponential-weight integral.
      const auto w = exponential_weights(k.grid, rho);
      double integral = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) integral += w[i] * k.mean[i];
      CHECK(std::abs(2.0 * integral - s.value / 4.0) < 1e-12);
      CHECK(s.tail_bound < 1e-10);
    }
    CHECK(golden_section_max(closed, 0.1, 10.0, 1e-8) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    const auto star = find_rho_star(k, 0.1, 10.0, 1e-6);
    CHECK(std::abs(star.rho_star - std::sqrt(2.0)) < 1e-3);
    CHECK(star.ratio == doctest::Approx(refresh_ratio(star.rho_star)));
  }
  SUBCASE("monotone sigma^2 puts the maximiser on the boundary") {
    // K = e^{-t} - e^{-2t}/2: sigma^2 = 8(1/(rho+1) - 1/(2(rho+2))) has derivative
    // 8(-1/(rho+1)^2 + 1/(2(rho+2)^2)) < 0 for all rho > 0, so the maximum on
    // [lo, hi] sits at lo.
    const auto k = synthetic([](double t) { return std::exp(-t) - 0.5 * std::exp(-2 * t); }, grid);
    const auto star = find_rho_star(k, 0.1, 10.0, 1e-6);
    CHECK(star.rho_star == doctest::Approx(0.1).epsilon(1e-4));
  }
  SUBCASE("domain errors") {
    const auto k = synthetic(expo, grid);
    CHECK_THROWS_AS(sigma2_from_kernel(k, 0.0), std::domain_error);
    CHECK_THROWS_AS(sigma2_from_kernel(k, -1.0), std::domain_error);
    CHECK_THROWS_AS(find_rho_star(k, 2.0, 1.0, 1e-4), std::domain_error);
    CHECK_THROWS_AS(find_rho_star(k, 0.1, 10.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(sigma2_from_kernel(synthetic(expo, uniform_grid(0.0, 5.0, 0.1)), 1.0), std::domain_error);
  }
}

TEST_CASE("sigma^2 from the kernel matches the direct estimator") {
  const auto k = estimate_kernel(default_kernel_grid(), 100'000, 8);
  const auto from_k = sigma2_from_kernel(k, 1.424);
  const auto direct = sigma2_direct(1.424, 100'000, 9);
  CHECK(std::abs(from_k.value - direct.value) < 4 * std::hypot(from_k.se, direct.se));

  const std::vector<double> rhos{0.5, 1.0, 2.0, 5.0};
  const auto scan = sigma_scan(k, rhos);
  for (std::size_t i = 0; i < rhos.size(); ++i) CHECK(scan.sigma2[i] > -4 * scan.se[i]);
}

TEST_CASE("zz_kernel_L_check at s = t") {
  const auto k = estimate_kernel(default_kernel_grid(), 1000, 10);
  SeriesRequest req;
  req.d = 16;
  req.stat = Statistic::neg_log_density();
  req.scale = TimeScale::sqrt_d;
  req.grid = {0.0, 1.0};
  req.n_paths = 200;
  req.seed = 11;
  const auto series = sample_series(req);
  CHECK(zz_kernel_L_check(k, 1.0, 1.0, series).predicted == 2.0);
  CHECK_THROWS_AS(zz_kernel_L_check(k, 0.0, 0.5, series), std::out_of_range);
}

TEST_CASE("fit_ou on an exact OU reference") {
  // theta = 0.5, stationary variance 2 requires sigma^2 = 4 theta = 2.
  const auto grid = uniform_grid(0.0, 20.0, 0.1);
  std::vector<TimeSeries> series(2000);
  for (std::size_t p = 0; p < series.size(); ++p) {
    RngStream rng(12, p);
    series[p] = limit::simulate_ou(0.5, std::sqrt(2.0), std::sqrt(2.0) * standard_normal(rng), grid, rng);
  }
  const auto lags = uniform_grid(0.0, 1.0, 0.1);
  const auto fit = fit_ou(series, lags);
  CHECK(fit.warnings.empty());
  CHECK(std::abs(fit.theta - 0.5) < 4 * fit.theta_se);
  CHECK(std::abs(fit.var0 - 2.0) < 4 * fit.var0_se);
  CHECK(fit.theta_se < 0.05);
  CHECK_THROWS_AS(fit_ou(series, std::vector<double>{0.0, 0.15}), std::domain_error);
}

TEST_CASE("fit_ou drops lags with nonpositive autocovariance") {
  // x_k = (-1)^k a: lag-one autocovariance is -Var(a), lag two is +Var(a).
  const auto grid = uniform_grid(0.0, 2.0, 0.1);
  std::vector<TimeSeries> series(200);
  for (std::size_t p = 0; p < series.size(); ++p) {
    RngStream rng(13, p);
    const double a = standard_normal(rng);
    series[p].times = grid;
    for (std::size_t i = 0; i < grid.size(); ++i) series[p].values.push_back(i % 2 ? -a : a);
  }
  const std::vector<double> lags{0.0, 0.1, 0.2};
  const auto fit = fit_ou(series, lags);
  CHECK(fit.warnings.size() == 1);
  CHECK(fit.autocovariance[1] < 0.0);
  // Lag 0 and lag 2 covariances differ only through the grand-mean centring.
  CHECK(std::abs(fit.theta) < 1e-3);
  CHECK_THROWS_AS(fit_ou(series, std::vector<double>{0.0, 0.1}), FitError);
}

TEST_CASE("Kolmogorov distribution") {
  // Reference values from scipy.special.kolmogorov.
  const std::vector<std::pair<double, double>> ref{
      {0.3, 0.9999906941986655},  {0.5, 0.9639452436648751},  {0.8, 0.5441424115741981},
      {1.0, 0.26999967167735456}, {1.18, 0.1234538094297657}, {1.2, 0.11224966667072497},
      {1.36, 0.049485876755377876}, {1.63, 0.009846364888486529}, {2.0, 0.0006709252557796953},
      {3.0, 3.045995948942526e-08}};
  for (auto [l, q] : ref) {
    INFO("lambda = " << l);
    CHECK(kolmogorov_sf(l) == doctest::Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("KS test calibration and power") {
  RngStream rng(14, 0);
  std::vector<double> x(10'000);
  int rejected = 0;
  for (int rep = 0; rep < 50; ++rep) {
    for (double& v : x) v = standard_normal(rng);
    rejected += ks_test(x, NormalTarget::N01) < 0.05;
  }
  CHECK(rejected / 50.0 < 0.15);

  for (double& v : x) v = std::sqrt(2.0) * standard_normal(rng);
  CHECK(ks_test(x, NormalTarget::N01) < 1e-6);
  CHECK(ks_test(x, NormalTarget::N02) > 0.01);

  CHECK_THROWS_AS(ks_test(std::vector<double>(99, 0.0), NormalTarget::N01), std::domain_error);
}

TEST_CASE("Stein solutions") {
  const auto xs = uniform_grid(-4.0, 4.0, 0.5);
  const auto f = stein_solve("x", xs);
  for (double v : f) CHECK(v == doctest::Approx(-1.0).epsilon(1e-10));
  for (double x : xs) {
    // Checked by substitution into f' - x f = h - E h.
    CHECK(stein_solution("x2", x) == doctest::Approx(-x).epsilon(1e-9).scale(1.0));
    CHECK(stein_solution("x3", x) == doctest::Approx(-(x * x + 2.0)).epsilon(1e-9));
  }

  // Integral form phi(x)^{-1} int_{-inf}^x sin(y) phi(y) dy by brute-force quadrature.
  for (double x : {-2.0, -0.3, 0.7, 2.5}) {
    auto integrand = [](double y) { return std::sin(y) * std::exp(-0.5 * y * y); };
    const double oracle_value = oracle::trapezoid(integrand, -12.0, x, 200'000) * std::exp(0.5 * x * x);
    CHECK(stein_solution("sin", x) == doctest::Approx(oracle_value).epsilon(1e-8).scale(1e-3));
  }

  for (const char* tag : {"x", "x2", "x3", "sin"}) {
    for (double x = -4.0; x <= 4.0 + 1e-9; x += 0.1) REQUIRE(std::abs(stein_residual(tag, x)) < 1e-6);
    const auto ibp = stein_ibp_check(tag);
    CHECK(std::abs(ibp.lhs - ibp.rhs) < 1e-6);
  }
  CHECK_THROWS_AS(stein_solution("cos", 0.0), CatalogError);
  CHECK_THROWS_AS(stein_ibp_check("cos"), CatalogError);
}
