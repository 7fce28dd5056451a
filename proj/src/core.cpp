#include "pdmp/core.hpp"

#include <algorithm>
#include <cmath>

namespace pdmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

void require_kind(const PhaseState& state, SamplerKind expected) {
  if (state.kind != expected)
    throw KindError(std::string("expected a ") + std::string(to_string(expected)) + " state, got " +
                    std::string(to_string(state.kind)));
  validate(state);
}

}  // namespace

std::string_view to_string(SamplerKind kind) { return kind == SamplerKind::zigzag ? "zigzag" : "bps"; }

void validate(const PhaseState& state) {
  const std::size_t d = state.position.size();
  if (d == 0 || state.velocity.size() != d) throw KindError("phase state: position/velocity dimension mismatch");
  if (state.kind == SamplerKind::zigzag) {
    const double speed = 1.0 / std::sqrt(static_cast<double>(d));
    for (double v : state.velocity)
      if (std::abs(std::abs(v) - speed) > 4.0 * std::numeric_limits<double>::epsilon() * speed)
        throw KindError("zigzag state: velocity components must be +-d^{-1/2}");
  } else {
    const double norm = std::sqrt(dot(state.velocity, state.velocity));
    if (std::abs(norm - 1.0) > 1e-10) throw KindError("bps state: velocity must have unit norm");
  }
}

PhaseState stationary_state(SamplerKind kind, int d, RngStream& rng) {
  if (d < 1) throw std::domain_error("stationary_state: d must be >= 1");
  PhaseState s;
  s.kind = kind;
  s.position.resize(static_cast<std::size_t>(d));
  for (double& x : s.position) x = standard_normal(rng);
  if (kind == SamplerKind::zigzag) {
    const double speed = 1.0 / std::sqrt(static_cast<double>(d));
    s.velocity.resize(static_cast<std::size_t>(d));
    for (double& v : s.velocity) v = random_sign(rng) * speed;
  } else {
    s.velocity = uniform_sphere(rng, d);
  }
  return s;
}

double invert_linear_rate(double u, double slope, double budget) {
  if (!(slope > 0.0)) throw std::domain_error("invert_linear_rate: slope must be positive");
  if (!(budget >= 0.0)) throw std::domain_error("invert_linear_rate: budget must be nonnegative");
  if (u >= 0.0) {
    // Rationalised root of slope/2 tau^2 + u tau - budget = 0.
    const double disc = std::sqrt(u * u + 2.0 * slope * budget);
    return disc + u > 0.0 ? 2.0 * budget / (u + disc) : 0.0;
  }
  return -u / slope + std::sqrt(2.0 * budget / slope);
}

void reflect_in_place(std::span<const double> xi, std::span<double> v) {
  const double n2 = dot(xi, xi);
  if (std::sqrt(n2) < 1e-14) throw DegenerateReflection("reflect: |xi| < 1e-14");
  const double c = 2.0 * dot(xi, v) / n2;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * xi[i];
}

std::vector<double> reflect(std::span<const double> xi, std::span<const double> v) {
  if (xi.size() != v.size()) throw std::invalid_argument("reflect: dimension mismatch");
  std::vector<double> out(v.begin(), v.end());
  reflect_in_place(xi, out);
  return out;
}

// ---------------------------------------------------------------- Zig-Zag

ZigZagEngine::ZigZagEngine(const PhaseState& init, RngStream& rng, std::vector<ClockDraw>* audit)
    : rng_(&rng), audit_(audit) {
  require_kind(init, SamplerKind::zigzag);
  const std::size_t d = init.dim();
  speed_ = 1.0 / std::sqrt(static_cast<double>(d));
  slope_ = 1.0 / static_cast<double>(d);
  xi_ = init.position;
  stamp_.assign(d, 0.0);
  sign_.resize(d);
  for (std::size_t i = 0; i < d; ++i) sign_[i] = init.velocity[i] > 0.0 ? 1.0 : -1.0;
  v2_ = static_cast<double>(d) * speed_ * speed_;

  std::vector<double> first(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double u = xi_[i] * sign_[i] * speed_;
    const double budget = -std::log(rng_->uniform_open_closed());
    first[i] = invert_linear_rate(u, slope_, budget);
    if (audit_) audit_->push_back({u, slope_, budget, first[i]});
  }
  clocks_.assign(first);
  resync();
}

void ZigZagEngine::schedule(std::size_t i, double u) {
  const double budget = -std::log(rng_->uniform_open_closed());
  const double tau = invert_linear_rate(u, slope_, budget);
  if (audit_) audit_->push_back({u, slope_, budget, tau});
  clocks_.update(i, time_ + tau);
}

void ZigZagEngine::resync() {
  double s = 0.0, r = 0.0;
  for (std::size_t j = 0; j < xi_.size(); ++j) {
    const double x = coordinate(j, time_);
    s += x * sign_[j];
    r += x * x;
  }
  s_ = s * speed_;
  r_ = r;
  since_resync_ = 0;
}

std::size_t ZigZagEngine::apply_next_event() {
  const std::size_t i = clocks_.top();
  const double t = clocks_.top_priority();
  const double h = t - time_;
  r_ += h * (2.0 * s_ + h * v2_);
  s_ += h * v2_;
  time_ = t;

  xi_[i] = coordinate(i, t);
  stamp_[i] = t;
  const double u = xi_[i] * sign_[i] * speed_;
  s_ -= 2.0 * u;
  sign_[i] = -sign_[i];
  schedule(i, -u);

  ++events_;
  if (++since_resync_ >= xi_.size()) resync();
  return i;
}

double ZigZagEngine::angular_momentum(double t) const { return s_ + (t - time_) * v2_; }

double ZigZagEngine::squared_norm(double t) const {
  const double h = t - time_;
  return r_ + h * (2.0 * s_ + h * v2_);
}

double ZigZagEngine::coordinate(std::size_t i, double t) const {
  return xi_[i] + sign_[i] * speed_ * (t - stamp_[i]);
}

PhaseState ZigZagEngine::state_at(double t) const {
  PhaseState s;
  s.kind = SamplerKind::zigzag;
  s.position.resize(dim());
  s.velocity.resize(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    s.position[i] = coordinate(i, t);
    s.velocity[i] = velocity(i);
  }
  return s;
}

// ---------------------------------------------------------------- BPS

BpsEngine::BpsEngine(const PhaseState& init, double rho, RngStream& rng, std::vector<ClockDraw>* audit)
    : rng_(&rng), audit_(audit), rho_(rho), xi_(init.position), v_(init.velocity) {
  require_kind(init, SamplerKind::bps);
  if (!(rho >= 0.0)) throw std::domain_error("bps: refreshment rate must be nonnegative");
  refresh_moments();
  draw_clocks();
}

void BpsEngine::refresh_moments() {
  s_ = dot(xi_, v_);
  r_ = dot(xi_, xi_);
  v2_ = dot(v_, v_);
}

void BpsEngine::draw_clocks() {
  const double budget = -std::log(rng_->uniform_open_closed());
  const double tau = invert_linear_rate(s_, v2_, budget);
  if (audit_) audit_->push_back({s_, v2_, budget, tau});
  next_bounce_ = time_ + tau;
  next_refresh_ = rho_ > 0.0 ? time_ + exponential(*rng_, rho_) : kInf;
}

EventKind BpsEngine::apply_next_event() {
  const double t = next_event_time();
  const double h = t - time_;
  for (std::size_t i = 0; i < xi_.size(); ++i) xi_[i] += h * v_[i];
  time_ = t;

  EventKind kind;
  if (next_refresh_ <= next_bounce_) {
    uniform_sphere(*rng_, v_);
    ++refreshes_;
    kind = EventKind::refresh;
  } else {
    reflect_in_place(xi_, v_);
    const double norm = std::sqrt(dot(v_, v_));
    if (std::abs(norm - 1.0) > 1e-12)
      for (double& x : v_) x /= norm;
    ++bounces_;
    kind = EventKind::bounce;
  }
  refresh_moments();
  draw_clocks();
  return kind;
}

PhaseState BpsEngine::state_at(double t) const {
  PhaseState s;
  s.kind = SamplerKind::bps;
  s.position.resize(dim());
  for (std::size_t i = 0; i < dim(); ++i) s.position[i] = coordinate(i, t);
  s.velocity = v_;
  return s;
}

// ---------------------------------------------------------------- trajectories

Trajectory zz_simulate(const PhaseState& init, double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) throw std::domain_error("zz_simulate: horizon must be positive");
  ZigZagEngine engine(init, rng);
  Trajectory traj{init, {}, horizon};
  std::vector<double> v = init.velocity;
  while (engine.next_event_time() <= horizon) {
    const double t = engine.next_event_time();
    const std::size_t i = engine.apply_next_event();
    v[i] = engine.velocity(i);
    traj.events.push_back({t, EventKind::flip, i, v});
  }
  return traj;
}

Trajectory bps_simulate(const PhaseState& init, double rho, double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) throw std::domain_error("bps_simulate: horizon must be positive");
  BpsEngine engine(init, rho, rng);
  Trajectory traj{init, {}, horizon};
  while (engine.next_event_time() <= horizon) {
    const double t = engine.next_event_time();
    const EventKind kind = engine.apply_next_event();
    const auto v = engine.velocity();
    traj.events.push_back({t, kind, 0, std::vector<double>(v.begin(), v.end())});
  }
  return traj;
}

TimeSeries eval_statistic(const Trajectory& traj, Statistic stat, std::span<const double> grid) {
  const std::size_t d = traj.initial.dim();
  const double dd = static_cast<double>(d);
  if (stat.kind == Statistic::Kind::first_k && (stat.k == 0 || stat.k > d))
    throw std::out_of_range("eval_statistic: first_k needs 1 <= k <= d");

  TimeSeries out;
  out.channels = stat.channels();
  out.times.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size() * out.channels);

  std::vector<double> xi = traj.initial.position;
  const std::vector<double>* v = &traj.initial.velocity;
  double t_k = 0.0;
  double s = dot(xi, *v), r = dot(xi, xi), v2 = dot(*v, *v);
  std::size_t next = 0;
  double previous = 0.0;

  for (double g : grid) {
    if (!(g >= 0.0 && g <= traj.horizon)) throw std::out_of_range("eval_statistic: grid point outside [0, horizon]");
    if (g < previous) throw std::out_of_range("eval_statistic: grid must be nondecreasing");
    previous = g;
    while (next < traj.events.size() && traj.events[next].time <= g) {
      const Event& e = traj.events[next];
      const double h = e.time - t_k;
      for (std::size_t i = 0; i < d; ++i) xi[i] += h * (*v)[i];
      v = &e.velocity_after;
      t_k = e.time;
      s = dot(xi, *v);
      r = dot(xi, xi);
      v2 = dot(*v, *v);
      ++next;
    }
    const double h = g - t_k;
    switch (stat.kind) {
      case Statistic::Kind::angular_momentum:
        out.values.push_back(s + h * v2);
        break;
      case Statistic::Kind::neg_log_density:
        out.values.push_back(std::sqrt(dd) * ((r + h * (2.0 * s + h * v2)) / dd - 1.0));
        break;
      case Statistic::Kind::first_k:
        for (std::size_t c = 0; c < stat.k; ++c) out.values.push_back(xi[c] + h * (*v)[c]);
        break;
    }
  }
  return out;
}

TestFunction parse_test_function(std::string_view tag) {
  if (tag == "f1" || tag == "angular_momentum") return TestFunction::angular_momentum;
  if (tag == "f2" || tag == "squared_norm") return TestFunction::squared_norm;
  if (tag == "f3" || tag == "first_coordinate") return TestFunction::first_coordinate;
  if (tag == "f4" || tag == "angular_momentum_squared") return TestFunction::angular_momentum_squared;
  throw CatalogError("unknown test function '" + std::string(tag) + "'");
}

double generator_residual(SamplerKind kind, TestFunction f, const PhaseState& state, double rho) {
  require_kind(state, kind);
  const auto& xi = state.position;
  const auto& v = state.velocity;
  const double s = dot(xi, v);
  const double v2 = dot(v, v);

  if (kind == SamplerKind::zigzag) {
    switch (f) {
      case TestFunction::angular_momentum: {
        double jumps = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
          const double a = xi[i] * v[i];
          jumps += positive_part(a) * (-2.0 * a);
        }
        return v2 + jumps;
      }
      case TestFunction::squared_norm:
        return 2.0 * s;
      case TestFunction::first_coordinate:
        return v[0];
      case TestFunction::angular_momentum_squared: {
        double jumps = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
          const double a = xi[i] * v[i];
          const double flipped = s - 2.0 * a;
          jumps += positive_part(a) * (flipped * flipped - s * s);
        }
        return 2.0 * s * v2 + jumps;
      }
    }
  } else {
    if (!(rho >= 0.0)) throw std::domain_error("generator_residual: rho must be nonnegative");
    const double d = static_cast<double>(xi.size());
    switch (f) {
      case TestFunction::angular_momentum:
        // <xi, kappa(v)> = -s; the sphere average of <xi, u> is 0.
        return v2 + positive_part(s) * (-2.0 * s) - rho * s;
      case TestFunction::squared_norm:
        return 2.0 * s;
      case TestFunction::first_coordinate:
        return v[0];
      case TestFunction::angular_momentum_squared:
        // Reflection preserves s^2; the sphere average of <xi, u>^2 is |xi|^2 / d.
        return 2.0 * s * v2 + rho * (dot(xi, xi) / d - s * s);
    }
  }
  throw CatalogError("unknown test function");
}

std::vector<double> uniform_grid(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw std::domain_error("uniform_grid: need step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = start + static_cast<double>(i) * step;
  return g;
}

}  // namespace pdmp
