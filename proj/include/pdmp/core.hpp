#pragma once

// Exact event-driven Zig-Zag and Bouncy Particle samplers for the standard
// Gaussian target N(0, I_d). Event times are obtained by inverting the
// integrated piecewise-linear rate in closed form; there is no thinning.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdmp/indexed_heap.hpp"
#include "pdmp/rngkit.hpp"
#include "pdmp/series.hpp"

namespace pdmp {

enum class SamplerKind { zigzag, bps };

std::string_view to_string(SamplerKind kind);

struct KindError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateReflection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CatalogError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PhaseState {
  std::vector<double> position;
  std::vector<double> velocity;
  SamplerKind kind = SamplerKind::zigzag;

  std::size_t dim() const { return position.size(); }
};

// Throws KindError if the velocity is not on the sampler's velocity set
// (ZigZag: every |v_i| = d^{-1/2}; BPS: |v| = 1 within 1e-10).
void validate(const PhaseState& state);

// xi ~ N(0, I_d); v uniform on {+-d^{-1/2}}^d (ZigZag) or on the sphere (BPS).
PhaseState stationary_state(SamplerKind kind, int d, RngStream& rng);

// Smallest tau >= 0 with int_0^tau (u + slope*s)^+ ds = budget.
double invert_linear_rate(double u, double slope, double budget);

// Reflection of v in the hyperplane orthogonal to xi (the gradient of the
// Gaussian potential). Throws DegenerateReflection when |xi| < 1e-14.
std::vector<double> reflect(std::span<const double> xi, std::span<const double> v);
void reflect_in_place(std::span<const double> xi, std::span<double> v);

enum class EventKind { flip, bounce, refresh };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::flip;
  std::size_t coordinate = 0;  // meaningful for flips
  std::vector<double> velocity_after;
};

struct Trajectory {
  PhaseState initial;
  std::vector<Event> events;
  double horizon = 0.0;
};

// One consumed exponential budget: the clock was started with rate
// t -> (u + slope*t)^+ and fired after tau.
struct ClockDraw {
  double u, slope, budget, tau;
};

// Zig-Zag engine. Coordinates are simulated lazily: each keeps its own
// position timestamp and next-flip time in an indexed heap, so a flip costs
// O(log d). Angular momentum and squared norm are tracked incrementally and
// resynchronised from the positions every d flips.
class ZigZagEngine {
 public:
  ZigZagEngine(const PhaseState& init, RngStream& rng, std::vector<ClockDraw>* audit = nullptr);

  std::size_t dim() const { return sign_.size(); }
  double time() const { return time_; }
  double next_event_time() const { return clocks_.top_priority(); }
  std::size_t next_coordinate() const { return clocks_.top(); }
  std::uint64_t event_count() const { return events_; }

  // Applies the pending flip and returns its coordinate.
  std::size_t apply_next_event();

  // Exact state queries at time t, valid for time() <= t <= next_event_time().
  double angular_momentum(double t) const;
  double squared_norm(double t) const;
  double coordinate(std::size_t i, double t) const;
  double velocity(std::size_t i) const { return sign_[i] * speed_; }

  PhaseState state_at(double t) const;

 private:
  void schedule(std::size_t i, double u);
  void resync();

  RngStream* rng_;
  std::vector<ClockDraw>* audit_;
  double speed_;  // d^{-1/2}
  double slope_;  // v_i^2 = 1/d
  double v2_;     // |v|^2
  std::vector<double> xi_;
  std::vector<double> stamp_;
  std::vector<double> sign_;
  IndexedMinHeap clocks_;
  double time_ = 0.0;
  double s_ = 0.0;  // <xi, v> at time_
  double r_ = 0.0;  // |xi|^2 at time_
  std::uint64_t events_ = 0;
  std::uint64_t since_resync_ = 0;
};

// Bouncy Particle Sampler engine with refreshment rate rho (0 disables it).
class BpsEngine {
 public:
  BpsEngine(const PhaseState& init, double rho, RngStream& rng, std::vector<ClockDraw>* audit = nullptr);

  std::size_t dim() const { return xi_.size(); }
  double time() const { return time_; }
  double next_event_time() const { return std::min(next_bounce_, next_refresh_); }
  std::uint64_t event_count() const { return bounces_ + refreshes_; }
  std::uint64_t bounce_count() const { return bounces_; }
  std::uint64_t refresh_count() const { return refreshes_; }

  // Applies the pending event (refresh wins exact ties).
  EventKind apply_next_event();

  double angular_momentum(double t) const { return s_ + (t - time_) * v2_; }
  double squared_norm(double t) const {
    const double h = t - time_;
    return r_ + h * (2.0 * s_ + h * v2_);
  }
  double coordinate(std::size_t i, double t) const { return xi_[i] + (t - time_) * v_[i]; }
  std::span<const double> velocity() const { return v_; }

  PhaseState state_at(double t) const;

 private:
  void refresh_moments();
  void draw_clocks();

  RngStream* rng_;
  std::vector<ClockDraw>* audit_;
  double rho_;
  std::vector<double> xi_, v_;
  double time_ = 0.0;
  double s_ = 0.0, r_ = 0.0, v2_ = 1.0;
  double next_bounce_ = 0.0, next_refresh_ = 0.0;
  std::uint64_t bounces_ = 0, refreshes_ = 0;
};

Trajectory zz_simulate(const PhaseState& init, double horizon, RngStream& rng);
Trajectory bps_simulate(const PhaseState& init, double rho, double horizon, RngStream& rng);

struct Statistic {
  enum class Kind { angular_momentum, neg_log_density, first_k };
  Kind kind = Kind::angular_momentum;
  std::size_t k = 1;

  static Statistic angular_momentum() { return {Kind::angular_momentum, 1}; }
  static Statistic neg_log_density() { return {Kind::neg_log_density, 1}; }
  static Statistic first_k(std::size_t k) { return {Kind::first_k, k}; }
  std::size_t channels() const { return kind == Kind::first_k ? k : 1; }
};

// Exact values of the statistic at the grid times (nondecreasing, within
// [0, horizon]); throws std::out_of_range otherwise.
TimeSeries eval_statistic(const Trajectory& traj, Statistic stat, std::span<const double> grid);

// Streaming counterpart used by the Monte Carlo drivers: advances an engine
// through the grid and writes the statistic at each grid time into out
// (grid.size() * stat.channels() slots). Events beyond the last grid time are
// not simulated.
template <class Engine>
void sample_statistic(Engine& engine, Statistic stat, std::span<const double> grid, std::span<double> out) {
  const double d = static_cast<double>(engine.dim());
  const double sqrt_d = std::sqrt(d);
  std::size_t slot = 0;
  for (double t : grid) {
    while (engine.next_event_time() <= t) engine.apply_next_event();
    switch (stat.kind) {
      case Statistic::Kind::angular_momentum:
        out[slot++] = engine.angular_momentum(t);
        break;
      case Statistic::Kind::neg_log_density:
        out[slot++] = sqrt_d * (engine.squared_norm(t) / d - 1.0);
        break;
      case Statistic::Kind::first_k:
        for (std::size_t c = 0; c < stat.k; ++c) out[slot++] = engine.coordinate(c, t);
        break;
    }
  }
}

// Catalog of closed-form test functions for the generator identity
// E_Pi[L f] = 0.
enum class TestFunction { angular_momentum, squared_norm, first_coordinate, angular_momentum_squared };

TestFunction parse_test_function(std::string_view tag);  // throws CatalogError

// (L f)(state) for the Zig-Zag or BPS generator on the Gaussian target.
double generator_residual(SamplerKind kind, TestFunction f, const PhaseState& state, double rho);

}  // namespace pdmp
