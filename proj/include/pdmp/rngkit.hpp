#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace pdmp {

// Keyed xoshiro256** stream. The 256-bit state is derived from
// (master_seed, stream_id) with SplitMix64, so every Monte Carlo path can own
// a stream whose output does not depend on thread scheduling.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  std::uint64_t stream_id() const { return stream_id_; }

  // Uniform on (0, 1]; never returns 0 so -log(u) is finite.
  double uniform_open_closed() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t stream_id_;
  std::normal_distribution<double> normal_;
};

double standard_normal(RngStream& rng);

// Throws std::domain_error for rate <= 0.
double exponential(RngStream& rng, double rate);

// Uniform direction on the unit sphere in R^d, by normalizing d standard normals.
std::vector<double> uniform_sphere(RngStream& rng, int d);
void uniform_sphere(RngStream& rng, std::span<double> out);

// Uniform on {-1, +1}.
double random_sign(RngStream& rng);

// E|sqrt(d) <e, v>|^alpha for v uniform on the sphere S^{d-1}, exact via log-gamma.
// Requires d >= 2 and alpha > -1.
double sphere_projection_moment(int d, double alpha);

}  // namespace pdmp
