#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "cli.hpp"

namespace pdmp::cli {

namespace {

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(field, why);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void validate(const ExperimentConfig& cfg) {
  const std::string& cmd = cfg.command;
  require(one_of(cmd, {"simulate", "kernel", "sigma-scan", "rho-opt", "ou-fit", "switch-stats", "verify"}), "command",
          "unknown command '" + cmd + "'");
  require(one_of(cfg.sampler, {"zigzag", "bps", "limit-t", "limit-sb", "zigzag-1d"}), "sampler",
          "must be zigzag, bps, limit-t, limit-sb or zigzag-1d");
  require(one_of(cfg.stat, {"angmom", "neglogdensity", "coord"}), "stat", "must be angmom, neglogdensity or coord");
  require(one_of(cfg.method, {"plain", "compensated"}), "method", "must be plain or compensated");
  require(cfg.d >= 1 && cfg.d <= 1000000, "d", "must be an integer in [1, 10^6]");
  require(finite(cfg.rho) && cfg.rho >= 0.0, "rho", "must be a finite nonnegative number");
  require(finite(cfg.horizon) && cfg.horizon > 0.0, "horizon", "must be positive");
  require(finite(cfg.n_paths) && cfg.n_paths >= 1.0 && cfg.n_paths <= 1e10 && std::floor(cfg.n_paths) == cfg.n_paths,
          "n_paths", "must be a positive integer");
  require(cfg.workers >= 0, "workers", "must be nonnegative");
  if (cfg.grid) {
    const auto& g = *cfg.grid;
    require(finite(g.start) && finite(g.stop) && finite(g.step), "grid", "must be finite");
    require(g.step > 0.0 && g.start >= 0.0 && g.stop >= g.start, "grid", "needs 0 <= start <= stop and step > 0");
  }

  const bool path_sampler = cfg.sampler == "zigzag" || cfg.sampler == "bps";
  if (cmd == "simulate" || cmd == "ou-fit")
    require(path_sampler || cfg.stat == "angmom", "stat", "limit processes only have their scalar value (angmom)");
  if (cmd == "ou-fit") {
    require(path_sampler, "sampler", "ou-fit needs zigzag or bps");
    require(finite(cfg.lag_step) && cfg.lag_step > 0.0, "lag_step", "must be positive");
    require(finite(cfg.lag_max) && cfg.lag_max >= cfg.lag_step, "lag_max", "must be at least lag_step");
    require(cfg.lag_max < cfg.horizon, "lag_max", "must be smaller than horizon");
    require(cfg.n_paths >= 2, "n_paths", "ou-fit needs at least 2 paths");
  }
  if (cmd == "kernel" || cmd == "sigma-scan" || cmd == "rho-opt") {
    require(cfg.n_paths >= 100, "n_paths", "kernel estimation needs at least 100 paths");
    require(finite(cfg.t_max) && cfg.t_max >= 0.3, "t_max", "must be at least 0.3");
    if (cmd != "kernel") require(cfg.t_max >= 10.0, "t_max", "sigma(rho)^2 needs a kernel grid reaching t >= 10");
  }
  if (cmd == "sigma-scan") {
    const auto& g = cfg.rho_grid;
    require(finite(g.start) && finite(g.stop) && finite(g.step) && g.start > 0.0 && g.step > 0.0 && g.stop >= g.start,
            "rho_grid", "needs 0 < start <= stop and step > 0");
  }
  if (cmd == "rho-opt") {
    require(finite(cfg.rho_min) && cfg.rho_min > 0.0, "rho_min", "must be positive");
    require(finite(cfg.rho_max) && cfg.rho_max > cfg.rho_min, "rho_max", "must exceed rho_min");
    require(finite(cfg.tol) && cfg.tol > 0.0, "tol", "must be positive");
  }
}

}  // namespace pdmp::cli
