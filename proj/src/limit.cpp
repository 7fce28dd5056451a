#include "pdmp/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pdmp/core.hpp"

namespace pdmp::limit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral of sgn(a + s) over s in [0, len].
double sign_integral(double a, double len) {
  if (a >= 0.0) return len;
  if (a + len <= 0.0) return -len;
  return 2.0 * a + len;
}

// Shared by T and S^B: slope +1, flips at rate x^+, refreshments at rate rho.
LimitPath simulate_momentum(LimitKind kind, double x0, double rho, double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) throw std::domain_error("limit path: horizon must be positive");
  if (!(rho >= 0.0)) throw std::domain_error("limit path: rho must be nonnegative");
  LimitPath path;
  path.kind = kind;
  path.rho = rho;
  path.initial = {0.0, x0, 1.0, false};
  path.horizon = horizon;

  double t = 0.0, x = x0;
  for (;;) {
    const double flip = invert_linear_rate(x, 1.0, -std::log(rng.uniform_open_closed()));
    const double refresh = rho > 0.0 ? exponential(rng, rho) : kInf;
    const double tau = std::min(flip, refresh);
    // Pending clocks past the horizon are discarded.
    if (t + tau > horizon) break;
    t += tau;
    if (refresh <= flip) {
      x = standard_normal(rng);
      path.events.push_back({t, x, 1.0, true});
    } else {
      x = -(x + tau);
      path.events.push_back({t, x, 1.0, false});
    }
  }
  return path;
}

}  // namespace

double LimitPath::value_at(double t) const {
  if (!(t >= 0.0 && t <= horizon)) throw std::out_of_range("LimitPath::value_at: t outside [0, horizon]");
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double time, const LimitEvent& e) { return time < e.time; });
  const LimitEvent& seg = it == events.begin() ? initial : *std::prev(it);
  return seg.value + seg.velocity * (t - seg.time);
}

double LimitPath::integral(double t) const {
  if (!(t >= 0.0 && t <= horizon)) throw std::out_of_range("LimitPath::integral: t outside [0, horizon]");
  double acc = 0.0;
  const LimitEvent* seg = &initial;
  for (const auto& e : events) {
    if (e.time > t) break;
    const double len = e.time - seg->time;
    acc += len * (seg->value + 0.5 * seg->velocity * len);
    seg = &e;
  }
  const double len = t - seg->time;
  return acc + len * (seg->value + 0.5 * seg->velocity * len);
}

LimitPath simulate_T(double x0, double horizon, RngStream& rng) {
  return simulate_momentum(LimitKind::T, x0, 0.0, horizon, rng);
}

LimitPath simulate_SB(double x0, double rho, double horizon, RngStream& rng) {
  return simulate_momentum(LimitKind::SB, x0, rho, horizon, rng);
}

LimitPath simulate_zigzag1d(double xi0, double v0, double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) throw std::domain_error("simulate_zigzag1d: horizon must be positive");
  if (v0 != 1.0 && v0 != -1.0) throw std::domain_error("simulate_zigzag1d: v0 must be +1 or -1");
  LimitPath path;
  path.kind = LimitKind::zigzag_1d;
  path.initial = {0.0, xi0, v0, false};
  path.horizon = horizon;

  double t = 0.0, xi = xi0, v = v0;
  for (;;) {
    const double tau = invert_linear_rate(xi * v, 1.0, -std::log(rng.uniform_open_closed()));
    if (t + tau > horizon) break;
    t += tau;
    xi += v * tau;
    v = -v;
    path.events.push_back({t, xi, v, false});
  }
  return path;
}

TimeSeries simulate_ou(double theta, double sigma, double x0, std::span<const double> grid, RngStream& rng) {
  if (!(theta > 0.0)) throw std::domain_error("simulate_ou: theta must be positive");
  if (!(sigma > 0.0)) throw std::domain_error("simulate_ou: sigma must be positive");
  TimeSeries out;
  out.times.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  if (grid.empty()) return out;
  double x = x0;
  out.values[0] = x;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double dt = grid[i] - grid[i - 1];
    if (dt < 0.0) throw std::domain_error("simulate_ou: grid must be nondecreasing");
    const double decay = std::exp(-theta * dt);
    const double sd = std::sqrt(sigma * sigma * -std::expm1(-2.0 * theta * dt) / (2.0 * theta));
    x = x * decay + sd * standard_normal(rng);
    out.values[i] = x;
  }
  return out;
}

ItoResiduals ito_residuals(const LimitPath& path) {
  ItoResiduals res;
  const double v0 = path.initial.value;
  double integral = 0.0, sign_int = 0.0;
  const LimitEvent* seg = &path.initial;
  auto check = [&](double value_at_t) {
    res.square = std::max(res.square, std::abs(value_at_t * value_at_t - v0 * v0 - 2.0 * integral));
    res.absolute = std::max(res.absolute, std::abs(std::abs(value_at_t) - std::abs(v0) - sign_int));
  };
  auto advance = [&](double until) {
    const double len = until - seg->time;
    integral += len * (seg->value + 0.5 * seg->velocity * len);
    sign_int += sign_integral(seg->value, len);
    return seg->value + seg->velocity * len;
  };
  for (const auto& e : path.events) {
    check(advance(e.time));
    seg = &e;
  }
  check(advance(path.horizon));
  return res;
}

ScalarFunction limit_test_function(std::string_view tag) {
  if (tag == "x") return {[](double x) { return x; }, [](double) { return 1.0; }, 0.0};
  if (tag == "x2") return {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }, 1.0};
  if (tag == "x3") return {[](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; }, 0.0};
  if (tag == "tanh")
    return {[](double x) { return std::tanh(x); },
            [](double x) {
              const double c = std::cosh(x);
              return 1.0 / (c * c);
            },
            0.0};
  throw CatalogError("unknown limit test function '" + std::string(tag) + "'");
}

double generator_T(const ScalarFunction& fn, double x) {
  const double jump = x > 0.0 ? x * (fn.f(-x) - fn.f(x)) : 0.0;
  return fn.df(x) + jump;
}

double generator_SB(const ScalarFunction& fn, double rho, double x) {
  return generator_T(fn, x) + rho * (fn.gaussian_mean - fn.f(x));
}

double drift_condition_check(DriftProcess process, double x) {
  if (process.kind == LimitKind::SB) {
    const ScalarFunction v{[](double y) { return 1.0 + y * y; }, [](double y) { return 2.0 * y; }, 2.0};
    return generator_SB(v, process.rho, x) / v.f(x);
  }
  if (process.kind != LimitKind::T) throw std::domain_error("drift_condition_check: process must be T or SB");
  if (x > 0.0 && x <= 4.0) throw std::domain_error("drift_condition_check: x lies in the small set (0, 4]");
  // Only the branches outside the small set are ever evaluated: for x > 4
  // we need V(x) and V(-x); for x <= 0 the jump term vanishes.
  const ScalarFunction v{[](double y) { return y > 4.0 ? 2.0 * std::exp(y) : std::exp(-y); },
                         [](double y) { return y > 4.0 ? 2.0 * std::exp(y) : -std::exp(-y); }, 0.0};
  return generator_T(v, x) / v.f(x);
}

}  // namespace pdmp::limit
