#pragma once

// Monte Carlo estimation of the limiting quantities of the Zig-Zag and BPS
// scaling limits: the covariance kernel K(t,0) of the momentum process T,
// its derivatives at 0, sigma(rho)^2 = 8 int e^{-rho s} K(s,0) ds and its
// maximiser, exponential autocovariance (OU) fits, KS tests and a Stein
// equation solver.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdmp/core.hpp"
#include "pdmp/parallel.hpp"
#include "pdmp/series.hpp"

namespace pdmp::analysis {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// ---------------------------------------------------------------- kernel

enum class KernelMethod {
  // K(t) = mean of T_0 T_t.
  plain,
  // K(t) = 1 + mean of T_0 int_0^t (G id)(T_s) ds, with G id(x) = 1 - 2 (x^+)^2.
  // Differs from the plain estimator by a zero-mean martingale term; its
  // variance vanishes as t -> 0, which makes finite differences at small
  // lags usable.
  compensated,
};

struct KernelEstimate {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> se;
  std::size_t n_paths = 0;
  KernelMethod method = KernelMethod::plain;
  double base_time = 0.0;
  double offset = 0.0;  // mean[i] = offset + moments.mean[i]
  MomentTable moments;

  // sum_i w_i K(grid_i) and its batch-means standard error.
  Estimate linear(std::span<const double> weights) const;
  double covariance(std::span<const double> w1, std::span<const double> w2) const;
  std::size_t index_of(double t) const;  // throws std::out_of_range if t is not a grid point
  double t_max() const { return grid.back(); }
};

// t in [0, 0.2] with step 0.02, then [0.3, 12] with step 0.1.
std::vector<double> default_kernel_grid(double t_max = 12.0);

// Stationary T paths; estimates E[T_b T_{b+t}] for the grid lags t (b = base_time).
KernelEstimate estimate_kernel(std::span<const double> grid, std::size_t n_paths, std::uint64_t seed,
                               Execution exec = Execution::parallel, KernelMethod method = KernelMethod::plain,
                               double base_time = 0.0);

// Weights w with sum_i w_i K_i = int_0^{t_max} K_lin(s) ds (trapezoid).
std::vector<double> trapezoid_weights(std::span<const double> grid);

Estimate kernel_integral(const KernelEstimate& k);

// (K(h) - 1) / h, using the exact K(0) = 1.
Estimate kernel_first_derivative(const KernelEstimate& k, double h);

// (K(2h) - 2K(h) + K(0)) / h^2; grid must contain 0, h, 2h with h <= 0.02.
Estimate kernel_second_derivative_check(const KernelEstimate& k, double h = 0.02);

// slope^2 - curvature with slope from lag h1 and curvature from lag h2; zero
// for an exponential kernel, 8/pi - 1 for K.
Estimate non_markov_witness(const KernelEstimate& k, double h1 = 0.01, double h2 = 0.02);

// Slope a of the fit 2 - 2K(h) = a h (+ b h^2 when h_grid has >= 2 points),
// least squares through the origin.
Estimate increment_variance_check(const KernelEstimate& k, std::span<const double> h_grid);

// |K(t)| <= C gamma^t on [t_lo, t_hi]: gamma from a log-linear fit of
// |K| + its standard error, C the smallest constant making the envelope dominate.
struct GeometricEnvelope {
  double C = 0.0;
  double gamma = 1.0;
};
GeometricEnvelope fit_geometric_envelope(const KernelEstimate& k, double t_lo = 4.0, double t_hi = 8.0);

// ---------------------------------------------------------------- sigma(rho)^2

struct Sigma2 {
  double value = 0.0;
  double se = 0.0;
  double tail_bound = 0.0;  // bound on the truncated tail beyond t_max, not added to value
};

// Weights w with sum_i w_i K_i = int_0^{t_max} e^{-rho s} K_lin(s) ds, exact
// for the piecewise-linear interpolant K_lin of the grid values.
std::vector<double> exponential_weights(std::span<const double> grid, double rho);

Sigma2 sigma2_from_kernel(const KernelEstimate& k, double rho);

// Independent route: 4 rho E[(int_0^{sigma} T_t dt)^2] with sigma ~ Exp(rho)
// independent of a stationary T path.
Estimate sigma2_direct(double rho, std::size_t n_paths, std::uint64_t seed, Execution exec = Execution::parallel);

struct SigmaScan {
  std::vector<double> rho_grid;
  std::vector<double> sigma2;
  std::vector<double> se;
  std::vector<double> tail_bound;
};
SigmaScan sigma_scan(const KernelEstimate& k, std::span<const double> rho_grid);

struct RhoStar {
  double rho_star = 0.0;
  double sigma2_max = 0.0;
  double ratio = 0.0;  // rho* / (1/sqrt(2 pi) + rho*)
};

// Golden-section maximisation of sigma2_from_kernel over [lo, hi].
RhoStar find_rho_star(const KernelEstimate& k, double lo, double hi, double tol);

// Same search for an arbitrary objective (used with closed-form kernels).
template <class Objective>
double golden_section_max(Objective&& f, double lo, double hi, double tol);

double refresh_ratio(double rho);

// ---------------------------------------------------------------- series

enum class TimeScale { raw, sqrt_d, d };

struct SeriesRequest {
  SamplerKind sampler = SamplerKind::zigzag;
  int d = 1;
  double rho = 0.0;
  Statistic stat = Statistic::angular_momentum();
  TimeScale scale = TimeScale::raw;
  std::vector<double> grid;  // in scaled time
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

double time_scale_factor(TimeScale scale, int d);

// One stationary path per entry; series times are the scaled grid.
std::vector<TimeSeries> sample_series(const SeriesRequest& req, Execution exec = Execution::parallel);

// Covariance of channel c at grid points i and j across paths.
Estimate series_covariance(std::span<const TimeSeries> series, std::size_t i, std::size_t j, std::size_t c = 0);

std::vector<double> series_marginal(std::span<const TimeSeries> series, std::size_t i, std::size_t c = 0);

struct OUFit {
  double theta = 0.0;
  double theta_se = 0.0;
  double var0 = 0.0;
  double var0_se = 0.0;
  double residual = 0.0;  // weighted residual sum of squares of the log-linear fit
  std::vector<double> lag_grid;
  std::vector<double> autocovariance;
  std::vector<double> autocovariance_se;
  std::vector<std::string> warnings;
};

// Autocovariance over all base times of each path (series on a common uniform
// grid); log c(tau) = log var0 - theta tau by weighted least squares. Lags
// with nonpositive autocovariance are dropped with a warning. Standard errors
// come from refitting on disjoint path groups.
OUFit fit_ou(std::span<const TimeSeries> series, std::span<const double> lag_grid, std::size_t channel = 0);

// ---------------------------------------------------------------- KS

enum class NormalTarget { N01, N02 };

double kolmogorov_sf(double lambda);
// Two-sided KS p-value (asymptotic Kolmogorov distribution); n >= 100.
double ks_test(std::span<const double> samples, NormalTarget target);

// ---------------------------------------------------------------- Zig-Zag kernel L

struct LCheck {
  double predicted = 0.0;
  double observed = 0.0;
  double combined_se = 0.0;
};

// predicted = 2 - 2 int_s^t int_s^t K(|u - v|) du dv, observed = Cov(Y_s, Y_t)
// from Zig-Zag neg-log-density series (sqrt(d) time scale) that contain s and t.
LCheck zz_kernel_L_check(const KernelEstimate& k, double s, double t, std::span<const TimeSeries> zz_series);

// ---------------------------------------------------------------- Stein

// Solution of f'(x) - x f(x) = h(x) - E h(W), W ~ N(0,1), for h in {x, x2, x3, sin}.
double stein_solution(std::string_view h_tag, double x);
std::vector<double> stein_solve(std::string_view h_tag, std::span<const double> x_grid);
// f'(x) - x f(x) - (h(x) - E h) with f' by a five-point stencil.
double stein_residual(std::string_view h_tag, double x);

struct IbpCheck {
  double lhs = 0.0;  // int (f' - x f) g phi
  double rhs = 0.0;  // -int f g' phi
};
// g(x) = x^2 / 2.
IbpCheck stein_ibp_check(std::string_view h_tag);

// ---------------------------------------------------------------- template impl

template <class Objective>
double golden_section_max(Objective&& f, double lo, double hi, double tol) {
  if (!(hi > lo)) throw std::domain_error("golden_section_max: empty range");
  if (!(tol > 0.0)) throw std::domain_error("golden_section_max: tol must be positive");
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace pdmp::analysis
