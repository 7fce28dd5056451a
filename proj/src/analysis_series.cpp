#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pdmp/analysis.hpp"

namespace pdmp::analysis {

double time_scale_factor(TimeScale scale, int d) {
  if (d < 1) throw std::domain_error("time_scale_factor: d must be at least 1");
  switch (scale) {
    case TimeScale::raw:
      return 1.0;
    case TimeScale::sqrt_d:
      return std::sqrt(static_cast<double>(d));
    case TimeScale::d:
      return static_cast<double>(d);
  }
  return 1.0;
}

std::vector<TimeSeries> sample_series(const SeriesRequest& req, Execution exec) {
  if (req.d < 1) throw std::domain_error("sample_series: d must be at least 1");
  if (req.n_paths == 0) throw std::domain_error("sample_series: n_paths must be positive");
  if (req.grid.empty()) throw std::domain_error("sample_series: empty grid");
  if (!(req.rho >= 0.0)) throw std::domain_error("sample_series: rho must be nonnegative");
  if (req.grid.front() < 0.0) throw std::domain_error("sample_series: grid must be nonnegative");
  for (std::size_t i = 1; i < req.grid.size(); ++i)
    if (req.grid[i] < req.grid[i - 1]) throw std::domain_error("sample_series: grid must be nondecreasing");
  if (req.stat.kind == Statistic::Kind::first_k && (req.stat.k < 1 || req.stat.k > static_cast<std::size_t>(req.d)))
    throw std::domain_error("sample_series: first_k needs 1 <= k <= d");

  const double factor = time_scale_factor(req.scale, req.d);
  std::vector<double> raw(req.grid.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = factor * req.grid[i];
  const std::size_t channels = req.stat.channels();

  return map_paths<TimeSeries>(
      req.n_paths,
      [&](std::size_t p) {
        RngStream rng(req.seed, p);
        TimeSeries ts;
        ts.times = req.grid;
        ts.channels = channels;
        ts.values.resize(raw.size() * channels);
        const PhaseState init = stationary_state(req.sampler, req.d, rng);
        if (req.sampler == SamplerKind::zigzag) {
          ZigZagEngine eng(init, rng);
          sample_statistic(eng, req.stat, raw, ts.values);
        } else {
          BpsEngine eng(init, req.rho, rng);
          sample_statistic(eng, req.stat, raw, ts.values);
        }
        return ts;
      },
      exec);
}

Estimate series_covariance(std::span<const TimeSeries> series, std::size_t i, std::size_t j, std::size_t c) {
  const std::size_t n = series.size();
  if (n < 2) throw std::domain_error("series_covariance: need at least two series");
  double mi = 0.0, mj = 0.0;
  for (const auto& s : series) {
    if (i >= s.size() || j >= s.size() || c >= s.channels) throw std::out_of_range("series_covariance: index");
    mi += s.value(i, c);
    mj += s.value(j, c);
  }
  mi /= static_cast<double>(n);
  mj /= static_cast<double>(n);
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (const auto& s : series) {
    const double z = (s.value(i, c) - mi) * (s.value(j, c) - mj);
    ++k;
    const double delta = z - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (z - mean);
  }
  const double nn = static_cast<double>(n);
  return {mean * nn / (nn - 1.0), std::sqrt(m2 / (nn - 1.0) / nn)};
}

std::vector<double> series_marginal(std::span<const TimeSeries> series, std::size_t i, std::size_t c) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& s : series) {
    if (i >= s.size() || c >= s.channels) throw std::out_of_range("series_marginal: index");
    out.push_back(s.value(i, c));
  }
  return out;
}

namespace {

// Weighted least squares of y = a - theta * tau. Returns (a, theta) and the
// rows of the solution operator so standard errors can be propagated.
struct LineFit {
  double a = 0.0, theta = 0.0, rss = 0.0;
  std::vector<double> row_a, row_theta;
};

LineFit weighted_line(std::span<const double> tau, std::span<const double> y, std::span<const double> w) {
  double sw = 0, st = 0, stt = 0, sy = 0, sty = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    sw += w[i];
    st += w[i] * tau[i];
    stt += w[i] * tau[i] * tau[i];
    sy += w[i] * y[i];
    sty += w[i] * tau[i] * y[i];
  }
  const double det = sw * stt - st * st;
  if (!(det > 0.0)) throw FitError("fit_ou: need at least two distinct usable lags");
  LineFit f;
  f.row_a.resize(tau.size());
  f.row_theta.resize(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    f.row_a[i] = w[i] * (stt - st * tau[i]) / det;
    f.row_theta[i] = -w[i] * (sw * tau[i] - st) / det;  // slope is -theta
  }
  for (std::size_t i = 0; i < tau.size(); ++i) {
    f.a += f.row_a[i] * y[i];
    f.theta += f.row_theta[i] * y[i];
  }
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double r = y[i] - f.a + f.theta * tau[i];
    f.rss += w[i] * r * r;
  }
  return f;
}

}  // namespace

OUFit fit_ou(std::span<const TimeSeries> series, std::span<const double> lag_grid, std::size_t channel) {
  const std::size_t n = series.size();
  if (n < 2) throw std::domain_error("fit_ou: need at least two series");
  if (lag_grid.size() < 2) throw std::domain_error("fit_ou: need at least two lags");
  const auto& times = series.front().times;
  const std::size_t len = times.size();
  if (len < 2) throw std::domain_error("fit_ou: series too short");
  const double step = times[1] - times[0];
  for (std::size_t i = 1; i < len; ++i)
    if (std::abs(times[i] - times[i - 1] - step) > 1e-9 * std::max(1.0, step))
      throw std::domain_error("fit_ou: series must share a uniform grid");
  for (const auto& s : series)
    if (s.size() != len || channel >= s.channels) throw std::domain_error("fit_ou: series shapes differ");

  std::vector<std::size_t> lag_steps;
  for (double tau : lag_grid) {
    const double r = tau / step;
    const double k = std::round(r);
    if (tau < 0.0 || std::abs(r - k) > 1e-6 || k >= static_cast<double>(len))
      throw std::domain_error("fit_ou: lag " + std::to_string(tau) + " is not a grid multiple within the series span");
    lag_steps.push_back(static_cast<std::size_t>(k));
  }

  double grand = 0.0;
  for (const auto& s : series)
    for (std::size_t t = 0; t < len; ++t) grand += s.value(t, channel);
  grand /= static_cast<double>(n * len);

  // Per-path lag averages, then group means for the error propagation.
  const std::size_t m = lag_steps.size();
  const std::size_t groups = std::min<std::size_t>(32, n);
  std::vector<double> total(m, 0.0), group(groups * m, 0.0), sq(m, 0.0);
  std::vector<std::size_t> group_n(groups, 0);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t g = p * groups / n;
    ++group_n[g];
    for (std::size_t l = 0; l < m; ++l) {
      const std::size_t k = lag_steps[l];
      double acc = 0.0;
      for (std::size_t t = 0; t + k < len; ++t)
        acc += (series[p].value(t, channel) - grand) * (series[p].value(t + k, channel) - grand);
      acc /= static_cast<double>(len - k);
      total[l] += acc;
      sq[l] += acc * acc;
      group[g * m + l] += acc;
    }
  }

  OUFit fit;
  const double nn = static_cast<double>(n);
  std::vector<double> cov(m), cov_se(m);
  for (std::size_t l = 0; l < m; ++l) {
    cov[l] = total[l] / nn;
    cov_se[l] = std::sqrt(std::max(0.0, sq[l] / nn - cov[l] * cov[l]) / (nn - 1.0));
  }
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t l = 0; l < m; ++l) group[g * m + l] /= static_cast<double>(group_n[g]);

  std::vector<double> tau, y, w;
  std::vector<std::size_t> used;
  for (std::size_t l = 0; l < m; ++l) {
    if (!(cov[l] > 0.0)) {
      fit.warnings.push_back("lag " + std::to_string(lag_grid[l]) + " excluded: nonpositive autocovariance");
      continue;
    }
    const double se = std::max(cov_se[l], 1e-300);
    used.push_back(l);
    tau.push_back(lag_grid[l]);
    y.push_back(std::log(cov[l]));
    w.push_back(cov[l] * cov[l] / (se * se));
  }
  const LineFit line = weighted_line(tau, y, w);
  fit.theta = line.theta;
  fit.var0 = std::exp(line.a);
  fit.residual = line.rss;
  fit.lag_grid.assign(lag_grid.begin(), lag_grid.end());
  fit.autocovariance = cov;
  fit.autocovariance_se = cov_se;

  // Delta method with the lag-to-lag covariance taken from the path groups.
  double var_theta = 0.0, var_a = 0.0;
  if (groups >= 2) {
    const double gg = static_cast<double>(groups);
    for (std::size_t g = 0; g < groups; ++g) {
      double dt = 0.0, da = 0.0;
      for (std::size_t u = 0; u < used.size(); ++u) {
        const std::size_t l = used[u];
        const double rel = (group[g * m + l] - cov[l]) / cov[l];
        dt += line.row_theta[u] * rel;
        da += line.row_a[u] * rel;
      }
      var_theta += dt * dt;
      var_a += da * da;
    }
    var_theta /= gg * (gg - 1.0);
    var_a /= gg * (gg - 1.0);
  }
  fit.theta_se = std::sqrt(var_theta);
  fit.var0_se = fit.var0 * std::sqrt(var_a);
  return fit;
}

namespace {

std::size_t series_index(const TimeSeries& s, double t) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(s.times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  throw std::out_of_range("zz_kernel_L_check: series grid has no point at t = " + std::to_string(t));
}

// Weights w with sum_i w_i K_i = int_0^D (D - u) K_lin(u) du. The integrand
// is quadratic on each grid cell, so Simpson's rule is exact.
std::vector<double> ramp_weights(std::span<const double> grid, double D) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size() && grid[i - 1] < D; ++i) {
    const double a = grid[i - 1], b = grid[i];
    const double len = b - a;
    const double e = std::min(b, D);
    auto add = [&](double u, double coef) {
      const double lam = (u - a) / len;  // K_lin(u) = (1 - lam) K_{i-1} + lam K_i
      w[i - 1] += coef * (D - u) * (1.0 - lam);
      w[i] += coef * (D - u) * lam;
    };
    const double h = (e - a) / 6.0;
    add(a, h);
    add(0.5 * (a + e), 4.0 * h);
    add(e, h);
  }
  return w;
}

}  // namespace

LCheck zz_kernel_L_check(const KernelEstimate& k, double s, double t, std::span<const TimeSeries> zz_series) {
  if (!(s >= 0.0 && t >= s)) throw std::out_of_range("zz_kernel_L_check: need 0 <= s <= t");
  if (t - s > k.t_max()) throw std::out_of_range("zz_kernel_L_check: t - s exceeds the kernel grid");
  if (zz_series.empty()) throw std::domain_error("zz_kernel_L_check: no series");
  const std::size_t is = series_index(zz_series.front(), s);
  const std::size_t it = series_index(zz_series.front(), t);

  LCheck out;
  // int_s^t int_s^t K(|u - v|) du dv = 2 int_0^{t-s} (t - s - w) K(w) dw
  auto w = ramp_weights(k.grid, t - s);
  for (double& x : w) x *= -4.0;
  const Estimate pred = k.linear(w);
  out.predicted = 2.0 + pred.value;
  const Estimate obs = series_covariance(zz_series, is, it);
  out.observed = obs.value;
  out.combined_se = std::sqrt(pred.se * pred.se + obs.se * obs.se);
  return out;
}

}  // namespace pdmp::analysis
