#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "pdmp/analysis.hpp"
#include "pdmp/parallel.hpp"

using namespace pdmp;

namespace {

// Restores the worker count when a test case ends.
struct WorkerGuard {
  int saved = worker_count();
  ~WorkerGuard() { set_worker_count(saved); }
};

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void toy_path(std::size_t, RngStream& rng, std::span<double> out) {
  const double x = rng.normal();
  out[0] = x;
  out[1] = x * x;
  out[2] = exponential(rng, 2.0);
}

}  // namespace

TEST_CASE("batch plan covers every item once") {
  for (std::size_t n : {1u, 7u, 256u, 1000u, 12345u})
    for (std::size_t b : {1u, 3u, 256u}) {
      if (b > n) continue;
      const BatchPlan plan(n, b);
      CHECK(plan.begin(0) == 0);
      CHECK(plan.end(b - 1) == n);
      for (std::size_t i = 0; i < n; i += 1 + n / 97) {
        const std::size_t k = plan.batch_of(i);
        REQUIRE(plan.begin(k) <= i);
        REQUIRE(i < plan.end(k));
      }
    }
}

TEST_CASE("serial reference and parallel kernel agree") {
  WorkerGuard guard;
  const auto serial = accumulate_paths(50'000, 3, 17, toy_path, Execution::serial);
  const auto parallel = accumulate_paths(50'000, 3, 17, toy_path, Execution::parallel);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(parallel.mean[j] == doctest::Approx(serial.mean[j]).epsilon(1e-12));
    CHECK(parallel.m2[j] == doctest::Approx(serial.m2[j]).epsilon(1e-12));
  }
  // Batch means do not depend on the mode.
  CHECK(bitwise_equal(serial.batch_mean, parallel.batch_mean));
  CHECK(serial.functional_stderr(std::vector<double>{1, 0, 0}) ==
        doctest::Approx(parallel.functional_stderr(std::vector<double>{1, 0, 0})).epsilon(1e-12));
}

TEST_CASE("parallel results are bit-identical for any worker count") {
  WorkerGuard guard;
  const std::vector<double> grid{0.0, 0.3, 1.0, 2.5};
  std::vector<std::vector<double>> means;
  for (int w : {1, 2, 8}) {
    set_worker_count(w);
    const auto k = analysis::estimate_kernel(grid, 5000, 3);
    means.push_back(k.mean);
    means.push_back(k.se);
  }
  CHECK(bitwise_equal(means[0], means[2]));
  CHECK(bitwise_equal(means[0], means[4]));
  CHECK(bitwise_equal(means[1], means[3]));
  CHECK(bitwise_equal(means[1], means[5]));
}

TEST_CASE("kernel estimate: serial and parallel agree") {
  WorkerGuard guard;
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto a = analysis::estimate_kernel(grid, 5000, 4, Execution::serial);
  const auto b = analysis::estimate_kernel(grid, 5000, 4, Execution::parallel);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.mean[i] == doctest::Approx(b.mean[i]).epsilon(1e-12));
}

TEST_CASE("map_paths keeps index order") {
  WorkerGuard guard;
  analysis::SeriesRequest req;
  req.sampler = SamplerKind::bps;
  req.d = 6;
  req.rho = 1.0;
  req.grid = {0.0, 1.0, 2.0};
  req.n_paths = 300;
  req.seed = 5;
  set_worker_count(1);
  const auto a = analysis::sample_series(req, Execution::serial);
  set_worker_count(8);
  const auto b = analysis::sample_series(req, Execution::parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t p = 0; p < a.size(); ++p) REQUIRE(bitwise_equal(a[p].values, b[p].values));
}
