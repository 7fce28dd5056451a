#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pdmp/analysis.hpp"
#include "pdmp/limit.hpp"

namespace pdmp::analysis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double positive_cube(double x) { return x > 0.0 ? x * x * x : 0.0; }

// Streaming stationary T path: value x at time `now`, next flip at `flip`.
// Advancing integrates (T_s^+)^2 exactly so the compensated estimator costs
// nothing extra.
struct TWalker {
  RngStream* rng;
  double now = 0.0;
  double x = 0.0;
  double flip = 0.0;

  explicit TWalker(RngStream& r) : rng(&r), x(standard_normal(r)) { draw(); }

  void draw() { flip = now + invert_linear_rate(x, 1.0, -std::log(rng->uniform_open_closed())); }

  // Returns int_now^t (T_s^+)^2 ds and moves to t.
  double advance(double t) {
    double acc = 0.0;
    while (flip <= t) {
      const double end = x + (flip - now);
      acc += (positive_cube(end) - positive_cube(x)) / 3.0;
      x = -end;
      now = flip;
      draw();
    }
    const double end = x + (t - now);
    acc += (positive_cube(end) - positive_cube(x)) / 3.0;
    x = end;
    now = t;
    return acc;
  }
};

void check_grid(std::span<const double> grid, const char* who) {
  if (grid.empty()) throw std::domain_error(std::string(who) + ": empty grid");
  if (grid[0] != 0.0) throw std::domain_error(std::string(who) + ": grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::domain_error(std::string(who) + ": grid must be increasing");
}

}  // namespace

std::vector<double> default_kernel_grid(double t_max) {
  if (!(t_max >= 0.3)) throw std::domain_error("default_kernel_grid: t_max must be at least 0.3");
  std::vector<double> g = uniform_grid(0.0, 0.2, 0.02);
  const auto coarse = uniform_grid(0.3, t_max, 0.1);
  g.insert(g.end(), coarse.begin(), coarse.end());
  return g;
}

KernelEstimate estimate_kernel(std::span<const double> grid, std::size_t n_paths, std::uint64_t seed,
                               Execution exec, KernelMethod method, double base_time) {
  check_grid(grid, "estimate_kernel");
  if (n_paths < 100) throw std::domain_error("estimate_kernel: need at least 100 paths");
  if (!(base_time >= 0.0)) throw std::domain_error("estimate_kernel: base_time must be nonnegative");

  const std::size_t width = grid.size();
  auto path_fn = [&](std::size_t, RngStream& rng, std::span<double> out) {
    TWalker w(rng);
    w.advance(base_time);
    const double x0 = w.x;
    if (method == KernelMethod::plain) {
      for (std::size_t i = 0; i < width; ++i) {
        w.advance(base_time + grid[i]);
        out[i] = x0 * w.x;
      }
    } else {
      // int_0^t (1 - 2 (T^+)^2) = t - 2 int (T^+)^2
      double pos2 = 0.0;
      for (std::size_t i = 0; i < width; ++i) {
        pos2 += w.advance(base_time + grid[i]);
        out[i] = x0 * (grid[i] - 2.0 * pos2);
      }
    }
  };

  KernelEstimate k;
  k.grid.assign(grid.begin(), grid.end());
  k.n_paths = n_paths;
  k.method = method;
  k.base_time = base_time;
  k.offset = method == KernelMethod::plain ? 0.0 : 1.0;
  k.moments = accumulate_paths(n_paths, width, seed, path_fn, exec);
  k.mean.resize(width);
  k.se.resize(width);
  for (std::size_t i = 0; i < width; ++i) {
    k.mean[i] = k.offset + k.moments.mean[i];
    k.se[i] = k.moments.stderr_of_mean(i);
  }
  return k;
}

Estimate KernelEstimate::linear(std::span<const double> weights) const {
  if (weights.size() != grid.size()) throw std::invalid_argument("KernelEstimate::linear: weight size mismatch");
  double value = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) value += weights[i] * mean[i];
  return {value, moments.functional_stderr(weights)};
}

double KernelEstimate::covariance(std::span<const double> w1, std::span<const double> w2) const {
  return moments.functional_covariance(w1, w2);
}

std::size_t KernelEstimate::index_of(double t) const {
  auto it = std::lower_bound(grid.begin(), grid.end(), t - 1e-9 * std::max(1.0, std::abs(t)));
  if (it == grid.end() || std::abs(*it - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::out_of_range("kernel grid has no point at t = " + std::to_string(t));
  return static_cast<std::size_t>(it - grid.begin());
}

std::vector<double> trapezoid_weights(std::span<const double> grid) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double half = 0.5 * (grid[i] - grid[i - 1]);
    w[i - 1] += half;
    w[i] += half;
  }
  return w;
}

Estimate kernel_integral(const KernelEstimate& k) { return k.linear(trapezoid_weights(k.grid)); }

Estimate kernel_first_derivative(const KernelEstimate& k, double h) {
  if (!(h > 0.0)) throw std::domain_error("kernel_first_derivative: h must be positive");
  std::vector<double> w(k.grid.size(), 0.0);
  w[k.index_of(h)] = 1.0 / h;
  const Estimate kh = k.linear(w);
  return {kh.value - 1.0 / h, kh.se};
}

namespace {

std::vector<double> second_difference_weights(const KernelEstimate& k, double h) {
  if (!(h > 0.0) || h > 0.02 + 1e-12)
    throw std::domain_error("kernel_second_derivative_check: h must lie in (0, 0.02]");
  std::array<std::size_t, 3> idx{};
  try {
    idx = {k.index_of(0.0), k.index_of(h), k.index_of(2.0 * h)};
  } catch (const std::out_of_range&) {
    throw std::domain_error("kernel_second_derivative_check: grid too coarse, needs 0, h and 2h");
  }
  std::vector<double> w(k.grid.size(), 0.0);
  const double inv = 1.0 / (h * h);
  w[idx[0]] += inv;
  w[idx[1]] -= 2.0 * inv;
  w[idx[2]] += inv;
  return w;
}

}  // namespace

Estimate kernel_second_derivative_check(const KernelEstimate& k, double h) {
  return k.linear(second_difference_weights(k, h));
}

Estimate non_markov_witness(const KernelEstimate& k, double h1, double h2) {
  const auto wc = second_difference_weights(k, h2);
  const Estimate slope = kernel_first_derivative(k, h1);
  const Estimate curv = k.linear(wc);
  // Delta method: gradient of slope^2 - curvature in the grid means.
  std::vector<double> g(k.grid.size(), 0.0);
  g[k.index_of(h1)] = 2.0 * slope.value / h1;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= wc[i];
  return {slope.value * slope.value - curv.value, k.moments.functional_stderr(g)};
}

Estimate increment_variance_check(const KernelEstimate& k, std::span<const double> h_grid) {
  if (h_grid.empty()) throw std::domain_error("increment_variance_check: empty h grid");
  for (double h : h_grid)
    if (!(h > 0.0 && h <= 0.1)) throw std::domain_error("increment_variance_check: h must lie in (0, 0.1]");

  // Row of the least-squares solution giving the linear coefficient a.
  std::vector<double> c(h_grid.size());
  if (h_grid.size() == 1) {
    c[0] = 1.0 / h_grid[0];
  } else {
    double s2 = 0, s3 = 0, s4 = 0;
    for (double h : h_grid) {
      s2 += h * h;
      s3 += h * h * h;
      s4 += h * h * h * h;
    }
    const double det = s2 * s4 - s3 * s3;
    if (!(det > 0.0)) throw std::domain_error("increment_variance_check: need two distinct h values");
    for (std::size_t j = 0; j < h_grid.size(); ++j) {
      const double h = h_grid[j];
      c[j] = (s4 * h - s3 * h * h) / det;
    }
  }
  // y_j = 2 - 2 K(h_j)
  std::vector<double> w(k.grid.size(), 0.0);
  double constant = 0.0;
  for (std::size_t j = 0; j < h_grid.size(); ++j) {
    w[k.index_of(h_grid[j])] -= 2.0 * c[j];
    constant += 2.0 * c[j];
  }
  const Estimate lin = k.linear(w);
  return {constant + lin.value, lin.se};
}

GeometricEnvelope fit_geometric_envelope(const KernelEstimate& k, double t_lo, double t_hi) {
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < k.grid.size(); ++i) {
    if (k.grid[i] < t_lo - 1e-12 || k.grid[i] > t_hi + 1e-12) continue;
    ts.push_back(k.grid[i]);
    ys.push_back(std::log(std::abs(k.mean[i]) + k.se[i]));
  }
  if (ts.size() < 2) throw std::domain_error("fit_geometric_envelope: fewer than two grid points in the window");
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= static_cast<double>(ts.size());
  my /= static_cast<double>(ts.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - mt) * (ys[i] - my);
    sxx += (ts[i] - mt) * (ts[i] - mt);
  }
  const double log_gamma = sxy / sxx;
  GeometricEnvelope env;
  env.gamma = std::exp(log_gamma);
  for (std::size_t i = 0; i < ts.size(); ++i) env.C = std::max(env.C, std::exp(ys[i] - log_gamma * ts[i]));
  return env;
}

std::vector<double> exponential_weights(std::span<const double> grid, double rho) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = grid[i - 1];
    const double len = grid[i] - a;
    const double x = rho * len;
    double p, q;
    if (x < 1e-2) {
      p = 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
      q = 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0;
    } else {
      const double em = std::expm1(-x);
      p = (-em - x * std::exp(-x)) / (x * x);
      q = (x + em) / (x * x);
    }
    const double scale = std::exp(-rho * a) * len;
    w[i - 1] += scale * q;
    w[i] += scale * p;
  }
  return w;
}

Sigma2 sigma2_from_kernel(const KernelEstimate& k, double rho) {
  if (!(rho > 0.0)) throw std::domain_error("sigma2_from_kernel: rho must be positive");
  if (k.t_max() < 10.0) throw std::domain_error("sigma2_from_kernel: kernel grid must extend to t >= 10");
  auto w = exponential_weights(k.grid, rho);
  for (double& x : w) x *= 8.0;
  const Estimate e = k.linear(w);

  Sigma2 out{e.value, e.se, kInf};
  const auto env = fit_geometric_envelope(k);
  const double log_gamma = std::log(env.gamma);
  // int_{t_max}^inf C gamma^s e^{-rho s} ds; finite whenever rho > log gamma.
  const double decay = rho - log_gamma;
  if (decay > 0.0) out.tail_bound = 8.0 * env.C * std::exp(-decay * k.t_max()) / decay;
  return out;
}

SigmaScan sigma_scan(const KernelEstimate& k, std::span<const double> rho_grid) {
  SigmaScan s;
  s.rho_grid.assign(rho_grid.begin(), rho_grid.end());
  for (double rho : rho_grid) {
    const Sigma2 v = sigma2_from_kernel(k, rho);
    s.sigma2.push_back(v.value);
    s.se.push_back(v.se);
    s.tail_bound.push_back(v.tail_bound);
  }
  return s;
}

double refresh_ratio(double rho) { return rho / (1.0 / std::sqrt(2.0 * std::numbers::pi) + rho); }

RhoStar find_rho_star(const KernelEstimate& k, double lo, double hi, double tol) {
  if (!(lo > 0.0)) throw std::domain_error("find_rho_star: range must lie in (0, inf)");
  const double rho = golden_section_max([&](double r) { return sigma2_from_kernel(k, r).value; }, lo, hi, tol);
  return {rho, sigma2_from_kernel(k, rho).value, refresh_ratio(rho)};
}

Estimate sigma2_direct(double rho, std::size_t n_paths, std::uint64_t seed, Execution exec) {
  if (!(rho > 0.0)) throw std::domain_error("sigma2_direct: rho must be positive");
  if (n_paths < 100) throw std::domain_error("sigma2_direct: need at least 100 paths");
  auto path_fn = [&](std::size_t, RngStream& rng, std::span<double> out) {
    const double x0 = standard_normal(rng);
    const double sigma = exponential(rng, rho);
    const auto path = limit::simulate_T(x0, sigma, rng);
    const double i = path.integral(sigma);
    out[0] = 4.0 * rho * i * i;
  };
  const MomentTable m = accumulate_paths(n_paths, 1, seed, path_fn, exec);
  return {m.mean[0], m.stderr_of_mean(0)};
}

}  // namespace pdmp::analysis
