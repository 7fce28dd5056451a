#include "pdmp/parallel.hpp"

#include <omp.h>

#include <exception>

namespace pdmp {

void set_worker_count(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

int worker_count() { return omp_get_max_threads(); }

BatchPlan::BatchPlan(std::size_t items, std::size_t batches) : n_items(items), n_batches(batches) {
  if (batches == 0 || batches > items) throw std::domain_error("BatchPlan: need 1 <= batches <= items");
}

std::size_t BatchPlan::batch_of(std::size_t item) const {
  // begin(b) <= item < end(b); start from the proportional guess and correct.
  std::size_t b = item * n_batches / n_items;
  while (b > 0 && begin(b) > item) --b;
  while (end(b) <= item) ++b;
  return b;
}

double MomentTable::functional(std::span<const double> weights) const {
  double s = 0.0;
  for (std::size_t j = 0; j < width; ++j) s += weights[j] * mean[j];
  return s;
}

double MomentTable::functional_covariance(std::span<const double> w1, std::span<const double> w2) const {
  if (n_batches < 2) return 0.0;
  const double f1 = functional(w1), f2 = functional(w2);
  double acc = 0.0, total = 0.0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double g1 = 0.0, g2 = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      g1 += w1[j] * batch_mean[b * width + j];
      g2 += w2[j] * batch_mean[b * width + j];
    }
    const double nb = static_cast<double>(batch_count[b]);
    acc += nb * (g1 - f1) * (g2 - f2);
    total += nb;
  }
  // sum_b n_b (g_b - f)^2 / (B - 1) estimates the per-path variance.
  const double per_path = acc / static_cast<double>(n_batches - 1);
  return per_path / total;
}

double MomentTable::functional_stderr(std::span<const double> weights) const {
  return std::sqrt(functional_covariance(weights, weights));
}

namespace detail {

MomentTable finish(std::size_t width, const Welford& total, const std::vector<Welford>& batches) {
  MomentTable t;
  t.width = width;
  t.n = total.n;
  t.mean = total.mean;
  t.m2 = total.m2;
  t.n_batches = batches.size();
  t.batch_mean.reserve(batches.size() * width);
  for (const auto& b : batches) {
    t.batch_mean.insert(t.batch_mean.end(), b.mean.begin(), b.mean.end());
    t.batch_count.push_back(b.n);
  }
  return t;
}

void run_batches(std::size_t n_batches, Execution exec, void (*body)(std::size_t, void*), void* ctx) {
  const auto n = static_cast<long long>(n_batches);
  if (exec == Execution::serial) {
    for (long long b = 0; b < n; ++b) body(static_cast<std::size_t>(b), ctx);
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long b = 0; b < n; ++b) {
    try {
      body(static_cast<std::size_t>(b), ctx);
    } catch (...) {
#pragma omp critical(pdmp_run_batches)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

}  // namespace pdmp
