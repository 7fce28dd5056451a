#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "cli.hpp"
#include "pdmp/analysis.hpp"
#include "pdmp/core.hpp"
#include "pdmp/limit.hpp"
#include "pdmp/parallel.hpp"

namespace pdmp::cli {

namespace {

using namespace pdmp::analysis;

const double kPhi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GridSpec parse_grid(const std::string& text, const char* field) {
  GridSpec g;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw ConfigError(field, "expected start:stop:step, got '" + text + "'");
  return g;
}

std::string grid_text(const GridSpec& g) {
  return format_number(g.start) + ":" + format_number(g.stop) + ":" + format_number(g.step);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SamplerKind sampler_kind(const std::string& s) { return s == "bps" ? SamplerKind::bps : SamplerKind::zigzag; }

Statistic statistic(const std::string& s) {
  if (s == "neglogdensity") return Statistic::neg_log_density();
  if (s == "coord") return Statistic::first_k(1);
  return Statistic::angular_momentum();
}

// Zig-Zag statistics all live on the sqrt(d) clock; for BPS the angular
// momentum mixes in raw time while log-density and coordinates need d.
TimeScale scale_for(const ExperimentConfig& cfg) {
  if (cfg.sampler == "zigzag") return TimeScale::sqrt_d;
  if (cfg.sampler == "bps") return cfg.stat == "angmom" ? TimeScale::raw : TimeScale::d;
  return TimeScale::raw;
}

const char* scale_name(TimeScale s) {
  switch (s) {
    case TimeScale::raw: return "t";
    case TimeScale::sqrt_d: return "sqrt(d) t";
    case TimeScale::d: return "d t";
  }
  return "t";
}

std::vector<double> sample_grid(const ExperimentConfig& cfg) {
  if (cfg.grid) {
    if (cfg.grid->stop > cfg.horizon + 1e-12) throw ConfigError("grid", "stop exceeds horizon");
    return uniform_grid(cfg.grid->start, cfg.grid->stop, cfg.grid->step);
  }
  return uniform_grid(0.0, cfg.horizon, cfg.horizon / 100.0);
}

void echo_config(ResultTable& t, const ExperimentConfig& cfg, std::initializer_list<const char*> keys) {
  t.add_meta("tool", std::string("pdmp ") + kVersion);
  t.add_meta("command", cfg.command);
  for (std::string k : keys) {
    if (k == "sampler") t.add_meta(k, cfg.sampler);
    else if (k == "stat") t.add_meta(k, cfg.stat);
    else if (k == "d") t.add_meta(k, std::to_string(cfg.d));
    else if (k == "rho") t.add_meta(k, format_number(cfg.rho));
    else if (k == "horizon") t.add_meta(k, format_number(cfg.horizon));
    else if (k == "n_paths") t.add_meta(k, std::to_string(cfg.paths()));
    else if (k == "grid") t.add_meta(k, cfg.grid ? grid_text(*cfg.grid) : "default");
    else if (k == "t_max") t.add_meta(k, format_number(cfg.t_max));
    else if (k == "method") t.add_meta(k, cfg.method);
    else if (k == "rho_grid") t.add_meta(k, grid_text(cfg.rho_grid));
    else if (k == "rho_range") t.add_meta(k, format_number(cfg.rho_min) + ":" + format_number(cfg.rho_max));
    else if (k == "tol") t.add_meta(k, format_number(cfg.tol));
    else if (k == "lags") t.add_meta(k, format_number(cfg.lag_step) + ":" + format_number(cfg.lag_max));
  }
  t.add_meta("seed", std::to_string(cfg.seed));
}

KernelEstimate kernel_for(const ExperimentConfig& cfg) {
  return estimate_kernel(default_kernel_grid(cfg.t_max), cfg.paths(), cfg.seed, Execution::parallel,
                         cfg.method == "compensated" ? KernelMethod::compensated : KernelMethod::plain);
}

// ---------------------------------------------------------------- commands

// Human-readable summary; kept off stdout when the CSV itself goes there.
std::ostream& report(const ExperimentConfig& cfg) { return cfg.out_path.empty() ? std::cerr : std::cout; }


ResultTable cmd_simulate(const ExperimentConfig& cfg) {
  ResultTable t;
  echo_config(t, cfg, {"sampler", "stat", "d", "rho", "horizon", "n_paths", "grid"});
  const auto grid = sample_grid(cfg);
  t.columns = {"path", "t", "value"};
  if (cfg.sampler == "zigzag" || cfg.sampler == "bps") {
    SeriesRequest req;
    req.sampler = sampler_kind(cfg.sampler);
    req.d = cfg.d;
    req.rho = cfg.rho;
    req.stat = statistic(cfg.stat);
    req.scale = scale_for(cfg);
    req.grid = grid;
    req.n_paths = cfg.paths();
    req.seed = cfg.seed;
    t.add_meta("time_scale", scale_name(req.scale));
    const auto series = sample_series(req);
    for (std::size_t p = 0; p < series.size(); ++p)
      for (std::size_t i = 0; i < grid.size(); ++i)
        t.rows.push_back({static_cast<double>(p), grid[i], series[p].value(i)});
    return t;
  }
  const auto paths = map_paths<limit::LimitPath>(cfg.paths(), [&](std::size_t p) {
    RngStream rng(cfg.seed, p);
    const double x0 = standard_normal(rng);
    if (cfg.sampler == "limit-t") return limit::simulate_T(x0, cfg.horizon, rng);
    if (cfg.sampler == "limit-sb") return limit::simulate_SB(x0, cfg.rho, cfg.horizon, rng);
    return limit::simulate_zigzag1d(x0, random_sign(rng), cfg.horizon, rng);
  });
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (double g : grid) t.rows.push_back({static_cast<double>(p), g, paths[p].value_at(g)});
  return t;
}

ResultTable cmd_kernel(const ExperimentConfig& cfg) {
  ResultTable t;
  echo_config(t, cfg, {"n_paths", "t_max", "method"});
  const auto k = kernel_for(cfg);
  const Estimate integral = kernel_integral(k);
  t.add_meta("integral", format_number(integral.value) + " +- " + format_number(integral.se));
  t.columns = {"t", "K", "stderr"};
  for (std::size_t i = 0; i < k.grid.size(); ++i) t.rows.push_back({k.grid[i], k.mean[i], k.se[i]});
  report(cfg) << "K(0) = " << k.mean[0] << " +- " << k.se[0] << ", integral = " << integral.value << " +- "
            << integral.se << '\n';
  return t;
}

ResultTable cmd_sigma_scan(const ExperimentConfig& cfg) {
  ResultTable t;
  echo_config(t, cfg, {"n_paths", "t_max", "method", "rho_grid"});
  const auto k = kernel_for(cfg);
  const auto rhos = uniform_grid(cfg.rho_grid.start, cfg.rho_grid.stop, cfg.rho_grid.step);
  const SigmaScan s = sigma_scan(k, rhos);
  t.columns = {"rho", "sigma2", "stderr", "tail_bound"};
  for (std::size_t i = 0; i < rhos.size(); ++i) t.rows.push_back({rhos[i], s.sigma2[i], s.se[i], s.tail_bound[i]});
  return t;
}

ResultTable cmd_rho_opt(const ExperimentConfig& cfg) {
  ResultTable t;
  echo_config(t, cfg, {"n_paths", "t_max", "method", "rho_range", "tol"});
  const auto k = kernel_for(cfg);
  const RhoStar r = find_rho_star(k, cfg.rho_min, cfg.rho_max, cfg.tol);
  const Sigma2 at = sigma2_from_kernel(k, r.rho_star);
  t.columns = {"rho_star", "sigma2_max", "stderr", "ratio"};
  t.rows.push_back({r.rho_star, r.sigma2_max, at.se, r.ratio});
  report(cfg) << "rho_star = " << r.rho_star << "\nsigma2_max = " << r.sigma2_max << " +- " << at.se
            << "\nratio = " << r.ratio << '\n';
  return t;
}

ResultTable cmd_ou_fit(const ExperimentConfig& cfg) {
  ResultTable t;
  echo_config(t, cfg, {"sampler", "stat", "d", "rho", "horizon", "n_paths", "lags"});
  SeriesRequest req;
  req.sampler = sampler_kind(cfg.sampler);
  req.d = cfg.d;
  req.rho = cfg.rho;
  req.stat = statistic(cfg.stat);
  req.scale = scale_for(cfg);
  req.grid = uniform_grid(0.0, cfg.horizon, cfg.lag_step);
  req.n_paths = cfg.paths();
  req.seed = cfg.seed;
  const auto lags = uniform_grid(0.0, cfg.lag_max, cfg.lag_step);
  const OUFit f = fit_ou(sample_series(req), lags);
  t.add_meta("time_scale", scale_name(req.scale));
  t.add_meta("theta", format_number(f.theta) + " +- " + format_number(f.theta_se));
  t.add_meta("var0", format_number(f.var0) + " +- " + format_number(f.var0_se));
  t.add_meta("residual", format_number(f.residual));
  for (const auto& w : f.warnings) {
    t.add_meta("warning", w);
    std::cerr << "warning: " << w << '\n';
  }
  t.columns = {"lag", "autocovariance", "stderr", "fitted"};
  for (std::size_t i = 0; i < lags.size(); ++i)
    t.rows.push_back({lags[i], f.autocovariance[i], f.autocovariance_se[i], f.var0 * std::exp(-f.theta * lags[i])});
  report(cfg) << "theta = " << f.theta << " +- " << f.theta_se << "\nvar0 = " << f.var0 << " +- " << f.var0_se << '\n';
  return t;
}

ResultTable cmd_switch_stats(const ExperimentConfig& cfg) {
  ResultTable t;
  echo_config(t, cfg, {"sampler", "d", "rho", "horizon", "n_paths"});
  const double h = cfg.horizon;
  const std::string& s = cfg.sampler;
  MomentTable m;
  double expected = kPhi0;
  if (s == "zigzag") {
    // Horizon in per-coordinate T time: raw time sqrt(d) h; report flips per coordinate per unit.
    const double raw = h * std::sqrt(static_cast<double>(cfg.d));
    t.add_meta("time_scale", "sqrt(d) t, per coordinate");
    m = accumulate_paths(cfg.paths(), 1, cfg.seed, [&](std::size_t, RngStream& rng, std::span<double> out) {
      ZigZagEngine eng(stationary_state(SamplerKind::zigzag, cfg.d, rng), rng);
      while (eng.next_event_time() <= raw) eng.apply_next_event();
      out[0] = static_cast<double>(eng.event_count()) / (cfg.d * h);
    });
  } else if (s == "bps") {
    expected = kPhi0 + cfg.rho;
    m = accumulate_paths(cfg.paths(), 3, cfg.seed, [&](std::size_t, RngStream& rng, std::span<double> out) {
      BpsEngine eng(stationary_state(SamplerKind::bps, cfg.d, rng), cfg.rho, rng);
      while (eng.next_event_time() <= h) eng.apply_next_event();
      out[0] = static_cast<double>(eng.event_count()) / h;
      out[1] = static_cast<double>(eng.bounce_count()) / h;
      out[2] = static_cast<double>(eng.refresh_count()) / h;
    });
  } else {
    if (s == "limit-sb") expected = kPhi0 + cfg.rho;
    m = accumulate_paths(cfg.paths(), 1, cfg.seed, [&](std::size_t, RngStream& rng, std::span<double> out) {
      const double x0 = standard_normal(rng);
      limit::LimitPath p = s == "limit-t"    ? limit::simulate_T(x0, h, rng)
                           : s == "limit-sb" ? limit::simulate_SB(x0, cfg.rho, h, rng)
                                             : limit::simulate_zigzag1d(x0, random_sign(rng), h, rng);
      out[0] = static_cast<double>(p.jump_count()) / h;
    });
  }
  t.columns = {"rate", "stderr", "expected"};
  std::vector<double> row{m.mean[0], m.stderr_of_mean(0), expected};
  if (s == "bps") {
    t.columns.insert(t.columns.end(), {"bounce_rate", "bounce_stderr", "refresh_rate", "refresh_stderr"});
    row.insert(row.end(), {m.mean[1], m.stderr_of_mean(1), m.mean[2], m.stderr_of_mean(2)});
  }
  t.rows.push_back(row);
  report(cfg) << "mean events/time = " << m.mean[0] << " +- " << m.stderr_of_mean(0) << " (expected " << expected
            << ")\n";
  return t;
}

void write_outputs(const ExperimentConfig& cfg, ResultTable& table, double wall) {
  table.run_info.emplace_back("timestamp", utc_timestamp());
  table.run_info.emplace_back("wall_time_s", format_number(wall));
  table.run_info.emplace_back("workers", std::to_string(worker_count()));
  if (!cfg.out_path.empty()) table.run_info.emplace_back("out", cfg.out_path);

  if (cfg.out_path.empty()) {
    write_csv(std::cout, table);
  } else {
    std::ofstream out(cfg.out_path);
    if (!out) throw RuntimeFailure("cannot write '" + cfg.out_path + "'");
    write_csv(out, table);
    if (!out) throw RuntimeFailure("write to '" + cfg.out_path + "' failed");
  }
  if (cfg.svg) {
    if (cfg.out_path.empty()) throw RuntimeFailure("--svg needs --out");
    const bool band = cfg.command == "kernel" || cfg.command == "sigma-scan" || cfg.command == "ou-fit";
    std::string title = cfg.command == "kernel"       ? "Monte Carlo estimate of K(t,0)"
                        : cfg.command == "sigma-scan" ? "sigma(rho)^2"
                                                      : cfg.command;
    const std::string svg = emit_svg(table, band ? PlotKind::line_with_band : PlotKind::line, title);
    const auto path = std::filesystem::path(cfg.out_path).replace_extension(".svg");
    std::ofstream out(path);
    if (!(out << svg)) throw RuntimeFailure("cannot write '" + path.string() + "'");
  }
}

constexpr const char* kFooter = R"(Time scales: horizon and grid are given in the natural clock of the statistic.
  zigzag: every statistic runs on sqrt(d) t (raw horizon sqrt(d) * horizon).
  bps:    angmom runs on raw t; neglogdensity and coord run on d t.
  switch-stats --sampler zigzag reads horizon as time per coordinate on the sqrt(d) clock.
Flags override values from --config (a plain "key = value" file, keys as the long flag names).
Exit codes: 0 success, 1 runtime failure, 2 invalid configuration, 3 verify criterion failed.)";

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  ExperimentConfig cfg;
  std::string grid_arg, rho_grid_arg;

  CLI::App app{"Simulation laboratory for Zig-Zag and Bouncy Particle samplers on a standard Gaussian target", "pdmp"};
  app.footer(kFooter);
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key = value file");
  app.set_version_flag("--version", kVersion);

  app.add_option("--sampler", cfg.sampler, "zigzag | bps | limit-t | limit-sb | zigzag-1d")->capture_default_str();
  app.add_option("--stat", cfg.stat, "angmom | neglogdensity | coord")->capture_default_str();
  app.add_option("--d", cfg.d, "Dimension")->capture_default_str();
  app.add_option("--rho", cfg.rho, "BPS refreshment rate")->capture_default_str();
  app.add_option("--horizon", cfg.horizon, "Time horizon (see time scales below)")->capture_default_str();
  app.add_option("--n-paths,--n_paths", cfg.n_paths, "Number of independent paths (1e6 notation accepted)")
      ->capture_default_str();
  app.add_option("--grid", grid_arg, "Sampling grid start:stop:step (default 0:horizon:horizon/100)");
  app.add_option("--t-max,--t_max", cfg.t_max, "Kernel grid end")->capture_default_str();
  app.add_option("--method", cfg.method, "Kernel estimator: plain | compensated")->capture_default_str();
  app.add_option("--rho-grid,--rho_grid", rho_grid_arg, "sigma-scan grid start:stop:step (default 0.05:10:0.05)");
  app.add_option("--rho-min,--rho_min", cfg.rho_min, "rho-opt search range start")->capture_default_str();
  app.add_option("--rho-max,--rho_max", cfg.rho_max, "rho-opt search range end")->capture_default_str();
  app.add_option("--tol", cfg.tol, "rho-opt tolerance")->capture_default_str();
  app.add_option("--lag-max,--lag_max", cfg.lag_max, "ou-fit largest lag")->capture_default_str();
  app.add_option("--lag-step,--lag_step", cfg.lag_step, "ou-fit lag spacing and series step")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads (0 = runtime default); never changes output bytes")
      ->capture_default_str();
  app.add_option("--out", cfg.out_path, "CSV output path (default stdout)");
  app.add_flag("--svg", cfg.svg, "Also write an SVG plot next to --out");
  app.add_option("--only", cfg.only, "verify: run only these criteria");

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Simulate paths and write a statistic on a time grid"},
      {"kernel", "Estimate the covariance kernel K(t,0) of the limiting momentum process"},
      {"sigma-scan", "Evaluate sigma(rho)^2 over a grid of refreshment rates"},
      {"rho-opt", "Maximise sigma(rho)^2 over rho"},
      {"ou-fit", "Fit an exponential autocovariance to a sampler statistic"},
      {"switch-stats", "Mean event rate of a sampler or limit process"},
      {"verify", "Run the acceptance criteria"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!grid_arg.empty()) cfg.grid = parse_grid(grid_arg, "grid");
    if (!rho_grid_arg.empty()) cfg.rho_grid = parse_grid(rho_grid_arg, "rho_grid");
    validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kConfigError;
  }

  set_worker_count(cfg.workers);
  try {
    if (cfg.command == "verify") {
      int failures = 0;
      try {
        failures = acceptance::run_criteria(cfg.only, std::cout);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("only", e.what());
      }
      std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
      return failures == 0 ? kOk : kVerifyFailure;
    }
    const auto t0 = std::chrono::steady_clock::now();
    ResultTable table;
    if (cfg.command == "simulate") table = cmd_simulate(cfg);
    else if (cfg.command == "kernel") table = cmd_kernel(cfg);
    else if (cfg.command == "sigma-scan") table = cmd_sigma_scan(cfg);
    else if (cfg.command == "rho-opt") table = cmd_rho_opt(cfg);
    else if (cfg.command == "ou-fit") table = cmd_ou_fit(cfg);
    else table = cmd_switch_stats(cfg);
    write_outputs(cfg, table, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace pdmp::cli
