#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "pdmp/rngkit.hpp"

namespace pdmp {

enum class Execution { serial, parallel };

// Number of OpenMP workers; 0 leaves the runtime default.
void set_worker_count(int workers);
int worker_count();

// Fixed partition of [0, n_items) into contiguous batches. Batch boundaries
// depend only on (n_items, n_batches), never on the worker count.
struct BatchPlan {
  std::size_t n_items = 0;
  std::size_t n_batches = 0;

  BatchPlan(std::size_t items, std::size_t batches);
  std::size_t begin(std::size_t b) const { return b * n_items / n_batches; }
  std::size_t end(std::size_t b) const { return (b + 1) * n_items / n_batches; }
  std::size_t batch_of(std::size_t item) const;
};

// Per-column path moments plus per-batch means (for standard errors of
// linear functionals of the column means).
struct MomentTable {
  std::size_t width = 0;
  std::size_t n = 0;
  std::vector<double> mean;
  std::vector<double> m2;
  std::size_t n_batches = 0;
  std::vector<double> batch_mean;  // row-major n_batches x width
  std::vector<std::size_t> batch_count;

  double variance(std::size_t col) const { return n > 1 ? m2[col] / static_cast<double>(n - 1) : 0.0; }
  double stderr_of_mean(std::size_t col) const { return std::sqrt(variance(col) / static_cast<double>(n)); }

  // sum_j w_j * mean_j
  double functional(std::span<const double> weights) const;
  // Batch-means standard error of sum_j w_j * mean_j.
  double functional_stderr(std::span<const double> weights) const;
  // Batch-means covariance between two linear functionals.
  double functional_covariance(std::span<const double> w1, std::span<const double> w2) const;
};

namespace detail {

struct Welford {
  std::size_t n = 0;
  std::vector<double> mean, m2;
  explicit Welford(std::size_t width) : mean(width, 0.0), m2(width, 0.0) {}
  void add(std::span<const double> x) {
    ++n;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double delta = x[j] - mean[j];
      mean[j] += delta * inv;
      m2[j] += delta * (x[j] - mean[j]);
    }
  }
  // Chan et al. pairwise merge.
  void merge(const Welford& o) {
    if (o.n == 0) return;
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double delta = o.mean[j] - mean[j];
      mean[j] += delta * nb / nt;
      m2[j] += o.m2[j] + delta * delta * na * nb / nt;
    }
    n += o.n;
  }
};

MomentTable finish(std::size_t width, const Welford& total, const std::vector<Welford>& batches);

void run_batches(std::size_t n_batches, Execution exec, void (*body)(std::size_t, void*), void* ctx);

}  // namespace detail

inline constexpr std::size_t kDefaultBatches = 256;

// Runs fn(path_index, rng, out) for every path, where out has `width` slots
// and rng is the stream (seed, stream_offset + path_index). The parallel mode
// accumulates each batch independently and merges batches in index order, so
// the result is bit-identical for any worker count. The serial mode is the
// straightforward single-pass reference; it agrees with the parallel mode up
// to floating-point summation order.
template <class PathFn>
MomentTable accumulate_paths(std::size_t n_paths, std::size_t width, std::uint64_t seed, PathFn&& fn,
                             Execution exec = Execution::parallel, std::size_t n_batches = kDefaultBatches,
                             std::uint64_t stream_offset = 0) {
  if (n_paths == 0) throw std::domain_error("accumulate_paths: no paths");
  if (n_batches > n_paths) n_batches = n_paths;
  const BatchPlan plan(n_paths, n_batches);
  std::vector<detail::Welford> batches(n_batches, detail::Welford(width));

  if (exec == Execution::serial) {
    detail::Welford total(width);
    std::vector<double> row(width);
    for (std::size_t p = 0; p < n_paths; ++p) {
      RngStream rng(seed, stream_offset + p);
      fn(p, rng, std::span<double>(row));
      total.add(row);
      batches[plan.batch_of(p)].add(row);
    }
    return detail::finish(width, total, batches);
  }

  struct Ctx {
    const BatchPlan* plan;
    std::vector<detail::Welford>* batches;
    std::remove_reference_t<PathFn>* fn;
    std::uint64_t seed, offset;
    std::size_t width;
  } ctx{&plan, &batches, &fn, seed, stream_offset, width};

  detail::run_batches(
      n_batches, Execution::parallel,
      [](std::size_t b, void* raw) {
        auto& c = *static_cast<Ctx*>(raw);
        std::vector<double> row(c.width);
        auto& acc = (*c.batches)[b];
        for (std::size_t p = c.plan->begin(b); p < c.plan->end(b); ++p) {
          RngStream rng(c.seed, c.offset + p);
          (*c.fn)(p, rng, std::span<double>(row));
          acc.add(row);
        }
      },
      &ctx);

  detail::Welford total(width);
  for (const auto& b : batches) total.merge(b);
  return detail::finish(width, total, batches);
}

// Calls fn(i) for i in [0, n) and stores results in index order.
template <class T, class Fn>
std::vector<T> map_paths(std::size_t n, Fn&& fn, Execution exec = Execution::parallel) {
  std::vector<T> out(n);
  if (n == 0) return out;
  struct Ctx {
    std::vector<T>* out;
    std::remove_reference_t<Fn>* fn;
    std::size_t n;
  } ctx{&out, &fn, n};
  detail::run_batches(
      n, exec,
      [](std::size_t i, void* raw) {
        auto& c = *static_cast<Ctx*>(raw);
        (*c.out)[i] = (*c.fn)(i);
      },
      &ctx);
  return out;
}

}  // namespace pdmp
