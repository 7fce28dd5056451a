#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdmp::cli {

inline constexpr const char* kVersion = "0.3.0";

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kConfigError = 2, kVerifyFailure = 3 };

// Raised by validation; the message names the offending field.
struct ConfigError : std::runtime_error {
  ConfigError(std::string field, const std::string& why)
      : std::runtime_error(field + ": " + why), field(std::move(field)) {}
  std::string field;
};

struct GridSpec {
  double start = 0.0, stop = 0.0, step = 0.0;
};

struct ExperimentConfig {
  std::string command;
  std::string sampler = "zigzag";  // zigzag, bps, limit-t, limit-sb, zigzag-1d
  std::string stat = "angmom";     // angmom, neglogdensity, coord
  int d = 16;
  double rho = 1.0;
  double horizon = 10.0;
  double n_paths = 1000;  // accepts 1e6-style input; must be a positive integer
  std::optional<GridSpec> grid;
  double t_max = 12.0;
  std::string method = "plain";  // kernel estimator: plain or compensated
  GridSpec rho_grid{0.05, 10.0, 0.05};
  double rho_min = 0.1, rho_max = 10.0, tol = 1e-4;
  double lag_max = 1.0, lag_step = 0.1;
  std::uint64_t seed = 7;
  int workers = 0;  // 0 = runtime default
  std::string out_path;
  bool svg = false;
  std::vector<std::string> only;  // verify: restrict to these criteria

  std::size_t paths() const { return static_cast<std::size_t>(n_paths); }
};

// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& cfg);

// Column-oriented numeric table plus metadata. `meta` lines are part of the
// reproducible output; `run_info` (wall time, timestamp) is written in its own
// comment block and ignored by determinism checks.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::pair<std::string, std::string>> run_info;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
};

// 12 significant digits, scientific notation.
std::string format_number(double x);
void write_csv(std::ostream& os, const ResultTable& table);
// The CSV with the run_info block removed, for byte comparisons.
std::string reproducible_part(const std::string& csv);

enum class PlotKind { line, line_with_band };

// Self-contained 720x360 SVG. Column 0 is x; with line_with_band the column
// named "stderr" draws a +-2 SE band around the first other column.
// Throws std::invalid_argument on an empty table.
std::string emit_svg(const ResultTable& table, PlotKind kind, const std::string& title = "");

// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace pdmp::cli
