#include "pdmp/rngkit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pdmp {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t x) { return splitmix64(x); }

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) : stream_id_(stream_id) {
  std::uint64_t key = mix(master_seed) ^ mix(mix(stream_id) + 0xD1B54A32D192ED03ULL);
  for (auto& word : state_) word = splitmix64(key);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

double standard_normal(RngStream& rng) { return rng.normal(); }

double exponential(RngStream& rng, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("exponential: rate must be positive");
  return -std::log(rng.uniform_open_closed()) / rate;
}

void uniform_sphere(RngStream& rng, std::span<double> out) {
  if (out.empty()) throw std::domain_error("uniform_sphere: dimension must be >= 1");
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : out) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  // x / |x| need not round to exactly +-1.
  if (out.size() == 1) {
    out[0] = out[0] > 0.0 ? 1.0 : -1.0;
    return;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : out) x *= inv;
}

std::vector<double> uniform_sphere(RngStream& rng, int d) {
  if (d < 1) throw std::domain_error("uniform_sphere: dimension must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(d));
  uniform_sphere(rng, v);
  return v;
}

double random_sign(RngStream& rng) { return (rng() >> 63) ? 1.0 : -1.0; }

double sphere_projection_moment(int d, double alpha) {
  if (d < 2) throw std::domain_error("sphere_projection_moment: d must be >= 2");
  if (!(alpha > -1.0)) throw std::domain_error("sphere_projection_moment: alpha must exceed -1");
  // B((a+1)/2, (d-1)/2) / B(1/2, (d-1)/2); the Gamma((d-1)/2) factors cancel.
  const double dd = d;
  const double log_value = 0.5 * alpha * std::log(dd) + std::lgamma(0.5 * (alpha + 1.0)) -
                           0.5 * std::log(std::numbers::pi) + std::lgamma(0.5 * dd) -
                           std::lgamma(0.5 * (dd + alpha));
  return std::exp(log_value);
}

}  // namespace pdmp
