#pragma once

#include <cstddef>
#include <vector>

namespace pdmp {

// Values of a summary statistic on a fixed time grid for one path. Multi-channel
// statistics (first k coordinates) are stored row-major: values[i * channels + c].
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::size_t channels = 1;

  std::size_t size() const { return times.size(); }
  double value(std::size_t i, std::size_t c = 0) const { return values[i * channels + c]; }
};

// Uniform grid start, start + step, ..., up to stop (inclusive within step/2).
std::vector<double> uniform_grid(double start, double stop, double step);

}  // namespace pdmp
