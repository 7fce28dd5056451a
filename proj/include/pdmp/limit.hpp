#pragma once

// One-dimensional limit processes: the Zig-Zag angular-momentum limit T
// (slope +1, sign flip at rate x^+), the BPS angular-momentum limit S^B
// (T plus N(0,1) refreshments at rate rho), the 1-D Zig-Zag position process,
// and an exact Ornstein-Uhlenbeck reference simulator.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "pdmp/rngkit.hpp"
#include "pdmp/series.hpp"

namespace pdmp::limit {

enum class LimitKind { T, SB, zigzag_1d };

struct LimitEvent {
  double time = 0.0;
  double value = 0.0;     // state right after the event (T / S^B value, or Zig-Zag position)
  double velocity = 1.0;  // slope of the following segment
  bool refresh = false;
};

// Piecewise-linear path; `initial` holds the time-0 state.
struct LimitPath {
  LimitKind kind = LimitKind::T;
  double rho = 0.0;
  LimitEvent initial;
  std::vector<LimitEvent> events;
  double horizon = 0.0;

  double value_at(double t) const;
  // Exact integral of the path over [0, t] (sum of per-segment trapezoids).
  double integral(double t) const;
  std::size_t jump_count() const { return events.size(); }
};

LimitPath simulate_T(double x0, double horizon, RngStream& rng);
LimitPath simulate_SB(double x0, double rho, double horizon, RngStream& rng);
// v0 must be +1 or -1.
LimitPath simulate_zigzag1d(double xi0, double v0, double horizon, RngStream& rng);

// Exact Gaussian transitions of dX = -theta X dt + sigma dW, X(grid[0]) = x0.
TimeSeries simulate_ou(double theta, double sigma, double x0, std::span<const double> grid, RngStream& rng);

// Largest deviation along the path from the pathwise identities
// T_t^2 - T_0^2 = 2 int_0^t T_s ds and |T_t| - |T_0| = int_0^t sgn(T_s) ds,
// checked at every event time and at the horizon.
struct ItoResiduals {
  double square = 0.0;
  double absolute = 0.0;
};
ItoResiduals ito_residuals(const LimitPath& path);

// Test function with its derivative and its N(0,1) mean (for the refreshment term).
struct ScalarFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  double gaussian_mean = 0.0;
};

// Catalog {x, x^2, x^3, tanh}; throws pdmp::CatalogError on an unknown tag.
ScalarFunction limit_test_function(std::string_view tag);

// G f(x) = f'(x) + x^+ (f(-x) - f(x))
double generator_T(const ScalarFunction& fn, double x);
// H f(x) = G f(x) + rho (int f dphi - f(x))
double generator_SB(const ScalarFunction& fn, double rho, double x);

struct DriftProcess {
  LimitKind kind = LimitKind::T;  // T or SB
  double rho = 0.0;
};

// (generator V)(x) / V(x) for the Foster-Lyapunov functions
// V(x) = 1 + x^2 (S^B) and V(x) = 2e^x for x > 4, e^{-x} for x <= 0 (T).
// For T, x in (0, 4] lies in the small set and throws std::domain_error.
double drift_condition_check(DriftProcess process, double x);

}  // namespace pdmp::limit
