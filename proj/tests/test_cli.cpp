#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "pdmp/parallel.hpp"

using namespace pdmp::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pdmp_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "pdmp");
  return run(args);
}

ExperimentConfig base(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  return c;
}

}  // namespace

TEST_CASE("validation names the offending field") {
  auto expect_field = [](ExperimentConfig c, const std::string& field) {
    try {
      validate(c);
      FAIL("no error for " << field);
    } catch (const ConfigError& e) {
      CHECK(e.field == field);
    }
  };
  CHECK_NOTHROW(validate(base("kernel")));

  auto c = base("kernel");
  c.n_paths = 50;
  expect_field(c, "n_paths");
  c = base("simulate");
  c.n_paths = 2.5;
  expect_field(c, "n_paths");
  c = base("simulate");
  c.d = 0;
  expect_field(c, "d");
  c = base("simulate");
  c.rho = -1;
  expect_field(c, "rho");
  c = base("simulate");
  c.sampler = "hmc";
  expect_field(c, "sampler");
  c = base("sigma-scan");
  c.t_max = 5;
  expect_field(c, "t_max");
  c = base("rho-opt");
  c.tol = 0;
  expect_field(c, "tol");
  c = base("ou-fit");
  c.sampler = "limit-t";
  expect_field(c, "sampler");
  c = base("ou-fit");
  c.lag_max = 20;
  expect_field(c, "lag_max");
  c = base("simulate");
  c.grid = GridSpec{0, 1, 0};
  expect_field(c, "grid");
}

TEST_CASE("number formatting keeps 12 significant digits") {
  CHECK(format_number(1.0) == "1.00000000000e+00");
  CHECK(format_number(-0.000123456789012345) == "-1.23456789012e-04");
  CHECK(std::stod(format_number(0.1 + 0.2)) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("csv layout") {
  ResultTable t;
  t.columns = {"t", "K"};
  t.rows = {{0.0, 1.0}, {0.5, 0.25}};
  t.add_meta("seed", "7");
  t.run_info = {{"wall_time_s", "0.1"}};
  std::ostringstream os;
  write_csv(os, t);
  const std::string csv = os.str();
  CHECK(csv.rfind("# seed = 7\n", 0) == 0);
  CHECK(csv.find("#@ wall_time_s = 0.1\n") != std::string::npos);
  CHECK(reproducible_part(csv) == "# seed = 7\nt,K\n0.00000000000e+00,1.00000000000e+00\n"
                                  "5.00000000000e-01,2.50000000000e-01\n");
}

TEST_CASE("svg output") {
  ResultTable t;
  t.columns = {"rho", "sigma2", "stderr"};
  t.rows = {{1.4, 0.9, 0.01}};
  const auto one = emit_svg(t, PlotKind::line_with_band, "single");
  CHECK(one.rfind("<?xml", 0) == 0);
  CHECK(one.find("<circle") != std::string::npos);
  CHECK(one.find("<circle", one.find("<circle") + 1) == std::string::npos);
  CHECK(one.substr(one.size() - 7) == "</svg>\n");

  t.rows = {{0, 1, 0.01}, {1, -0.2, 0.01}, {2, 0.0, 0.01}};
  const auto curve = emit_svg(t, PlotKind::line_with_band);
  CHECK(curve.find("<polygon") != std::string::npos);
  CHECK(curve.find("<polyline") != std::string::npos);

  ResultTable empty;
  empty.columns = {"t", "K"};
  CHECK_THROWS_AS(emit_svg(empty, PlotKind::line), std::invalid_argument);
}

TEST_CASE("exit codes") {
  CHECK(run_args({"kernel", "--n-paths", "50", "--out", scratch("x.csv").string()}) == kConfigError);
  CHECK(run_args({"kernel", "--bogus", "1"}) == kConfigError);
  CHECK(run_args({}) == kConfigError);
  CHECK(run_args({"verify", "--only", "no_such_criterion"}) == kConfigError);
  CHECK(run_args({"switch-stats", "--sampler", "bps", "--n-paths", "20", "--out", "/nonexistent/dir/x.csv"}) ==
        kRuntimeFailure);
  CHECK(run_args({"--version"}) == kOk);
}

TEST_CASE("config file with command-line override") {
  const auto cfg_path = scratch("run.cfg");
  const auto out = scratch("kernel.csv");
  {
    std::ofstream f(cfg_path);
    f << "seed = 9\nn_paths = 200\nt_max = 1\n";
  }
  REQUIRE(run_args({"kernel", "--config", cfg_path.string(), "--seed", "3", "--out", out.string()}) == kOk);
  const std::string csv = slurp(out);
  CHECK(csv.find("# seed = 3\n") != std::string::npos);
  CHECK(csv.find("# n_paths = 200\n") != std::string::npos);
  CHECK(csv.find("t,K,stderr\n") != std::string::npos);
  // K(0) row.
  const auto row0 = csv.find("0.00000000000e+00,");
  REQUIRE(row0 != std::string::npos);
}

TEST_CASE("output bytes do not depend on the worker count") {
  const int saved = pdmp::worker_count();
  std::vector<std::string> parts;
  for (const char* workers : {"1", "4"}) {
    const auto out = scratch(std::string("det_") + workers + ".csv");
    REQUIRE(run_args({"simulate", "--sampler", "bps", "--stat", "neglogdensity", "--d", "8", "--n-paths", "20",
                      "--horizon", "3", "--workers", workers, "--out", out.string()}) == kOk);
    parts.push_back(reproducible_part(slurp(out)));
  }
  pdmp::set_worker_count(saved);
  CHECK(parts[0] == parts[1]);
  CHECK(parts[0].find("path,t,value\n") != std::string::npos);
}

TEST_CASE("svg is written next to the csv") {
  const auto out = scratch("scan.csv");
  fs::remove(scratch("scan.svg"));
  REQUIRE(run_args({"sigma-scan", "--n-paths", "2000", "--rho-grid", "0.5:3:0.5", "--svg", "--out", out.string()}) ==
          kOk);
  CHECK(fs::exists(scratch("scan.svg")));
}
