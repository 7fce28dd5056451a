#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdmp/analysis.hpp"

namespace pdmp::acceptance {

struct Outcome {
  bool pass = false;
  std::string measured;
  std::string expected;
};

// Expensive estimates shared by several criteria, computed on first use.
class Context {
 public:
  const analysis::KernelEstimate& kernel();              // 10^6 plain paths, default grid, serial
  double kernel_seconds();                                // wall time of that estimate
  const analysis::KernelEstimate& fine_kernel();         // 10^7 compensated paths on [0, 0.1]
  double fine_kernel_seconds();

 private:
  std::optional<analysis::KernelEstimate> kernel_, fine_;
  double kernel_seconds_ = 0.0, fine_seconds_ = 0.0;
};

struct Criterion {
  std::string slug;
  std::string title;
  std::function<Outcome(Context&)> run;
};

const std::vector<Criterion>& criteria();

// Runs the selected criteria (all when `only` is empty), printing one
// PASS/FAIL line each. Returns the number of failures; unknown slugs throw
// std::invalid_argument.
int run_criteria(const std::vector<std::string>& only, std::ostream& os);

}  // namespace pdmp::acceptance
