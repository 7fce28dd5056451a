#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace pdmp {

// Binary min-heap over keys 0..n-1 with O(log n) key updates. Used as the
// per-coordinate clock queue of the Zig-Zag engine.
class IndexedMinHeap {
 public:
  explicit IndexedMinHeap(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    priority_.assign(n, std::numeric_limits<double>::infinity());
    heap_.resize(n);
    slot_.resize(n);
    for (std::size_t i = 0; i < n; ++i) heap_[i] = slot_[i] = i;
  }

  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }

  std::size_t top() const { return heap_.front(); }
  double top_priority() const { return priority_[heap_.front()]; }
  double priority(std::size_t key) const { return priority_[key]; }

  void update(std::size_t key, double value) {
    const double old = priority_[key];
    priority_[key] = value;
    if (value < old)
      sift_up(slot_[key]);
    else
      sift_down(slot_[key]);
  }

  // Bulk load, then heapify in O(n).
  void assign(const std::vector<double>& values) {
    reset(values.size());
    priority_ = values;
    for (std::size_t i = heap_.size() / 2; i-- > 0;) sift_down(i);
  }

 private:
  bool less(std::size_t a, std::size_t b) const {
    const double pa = priority_[heap_[a]], pb = priority_[heap_[b]];
    return pa < pb || (pa == pb && heap_[a] < heap_[b]);
  }

  void swap_slots(std::size_t a, std::size_t b) {
    std::swap(heap_[a], heap_[b]);
    slot_[heap_[a]] = a;
    slot_[heap_[b]] = b;
  }

  void sift_up(std::size_t i) {
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!less(i, parent)) break;
      swap_slots(i, parent);
      i = parent;
    }
  }

  void sift_down(std::size_t i) {
    const std::size_t n = heap_.size();
    for (;;) {
      std::size_t best = i;
      const std::size_t l = 2 * i + 1, r = l + 1;
      if (l < n && less(l, best)) best = l;
      if (r < n && less(r, best)) best = r;
      if (best == i) break;
      swap_slots(i, best);
      i = best;
    }
  }

  std::vector<double> priority_;
  std::vector<std::size_t> heap_;  // heap position -> key
  std::vector<std::size_t> slot_;  // key -> heap position
};

}  // namespace pdmp
