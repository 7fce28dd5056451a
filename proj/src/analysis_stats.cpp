#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pdmp/analysis.hpp"

namespace pdmp::analysis {

// Q(lambda) = P(sup |B_t| > lambda) for the Brownian bridge. The alternating
// series converges fast for large lambda; the Jacobi-theta form for small.
double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    const double pi = std::numbers::pi;
    const double c = -pi * pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      s += std::exp(c * m * m);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double ks_test(std::span<const double> samples, NormalTarget target) {
  if (samples.size() < 100) throw std::domain_error("ks_test: need at least 100 samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double scale = target == NormalTarget::N01 ? 1.0 : std::sqrt(2.0);
  const double n = static_cast<double>(x.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = 0.5 * std::erfc(-x[i] / (scale * std::numbers::sqrt2));
    dmax = std::max({dmax, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return kolmogorov_sf(std::sqrt(n) * dmax);
}

namespace {

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double stein_h(std::string_view tag, double x) {
  if (tag == "x") return x;
  if (tag == "x2") return x * x;
  if (tag == "x3") return x * x * x;
  if (tag == "sin") return std::sin(x);
  throw CatalogError("unknown Stein test function '" + std::string(tag) + "'");
}

template <class F>
double integrate(F f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

double gaussian_mean(std::string_view tag) {
  stein_h(tag, 0.0);  // validates the tag
  return integrate([&](double y) { return stein_h(tag, y) * phi(y); }, -std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity());
}

double solution_with_mean(std::string_view tag, double mean, double x) {
  auto g = [&](double y) { return (stein_h(tag, y) - mean) * phi(y); };
  // The right-tail form avoids cancellation for x > 0.
  if (x > 0.0) return -integrate(g, x, std::numeric_limits<double>::infinity()) / phi(x);
  return integrate(g, -std::numeric_limits<double>::infinity(), x) / phi(x);
}

double residual_with_mean(std::string_view tag, double mean, double x) {
  const double h = 1e-2;
  auto f = [&](double y) { return solution_with_mean(tag, mean, y); };
  const double df = (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
  return df - x * f(x) - (stein_h(tag, x) - mean);
}

}  // namespace

double stein_solution(std::string_view h_tag, double x) {
  return solution_with_mean(h_tag, gaussian_mean(h_tag), x);
}

std::vector<double> stein_solve(std::string_view h_tag, std::span<const double> x_grid) {
  const double mean = gaussian_mean(h_tag);
  std::vector<double> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) out.push_back(solution_with_mean(h_tag, mean, x));
  return out;
}

double stein_residual(std::string_view h_tag, double x) {
  return residual_with_mean(h_tag, gaussian_mean(h_tag), x);
}

IbpCheck stein_ibp_check(std::string_view h_tag) {
  const double mean = gaussian_mean(h_tag);
  const double lo = -8.0, hi = 8.0;
  IbpCheck out;
  // (L f)(x) = f'(x) - x f(x), with f' numerical as in stein_residual.
  out.lhs = integrate(
      [&](double x) {
        const double lf = residual_with_mean(h_tag, mean, x) + (stein_h(h_tag, x) - mean);
        return lf * 0.5 * x * x * phi(x);
      },
      lo, hi);
  out.rhs = -integrate([&](double x) { return solution_with_mean(h_tag, mean, x) * x * phi(x); }, lo, hi);
  return out;
}

}  // namespace pdmp::analysis
