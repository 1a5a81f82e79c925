#include "doctest.h"

#include "hpdg/config.hpp"
#include "hpdg/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hpdg;

namespace {

std::string cli() {
  const char* path = std::getenv("HPDG_CLI");
  REQUIRE(path != nullptr);
  return path;
}

int run(const std::string& args) {
  const int status = std::system((cli() + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hpdg_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string synthetic_csv(const std::function<double(double)>& error) {
  std::string csv = "step,dofs,error,eta,effectivity\n";
  for (int k = 0; k < 10; ++k) {
    const double dofs = 100.0 * std::pow(1.6, k);
    const double e = error(dofs);
    char line[160];
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,2\n", k, dofs, e, 2 * e);
    csv += line;
  }
  return csv;
}

}  // namespace

TEST_CASE("run writes records and mesh dumps") {
  const auto dir = scratch("run");
  write(dir / "run.cfg", "benchmark = lshape\nn_per_side = 1\nmax_steps = 2\n");
  const std::string common = (dir / "run.cfg").string() + " --set output_dir=";
  REQUIRE(run("run " + common + (dir / "a").string()) == 0);
  for (const char* f : {"run.csv", "run.json", "config.txt", "meshes/step_000.txt", "meshes/step_002.txt"})
    CHECK(fs::exists(dir / "a" / f));

  REQUIRE(run("run " + common + (dir / "b").string()) == 0);
  // identical up to the timing column
  auto strip_timing = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  CHECK(strip_timing(read(dir / "a" / "run.csv")) == strip_timing(read(dir / "b" / "run.csv")));
  CHECK(read(dir / "a" / "meshes" / "step_002.txt") == read(dir / "b" / "meshes" / "step_002.txt"));
}

TEST_CASE("dof budget through the CLI") {
  const auto dir = scratch("budget");
  write(dir / "run.cfg", "n_per_side = 1\nmax_dofs = 100\noutput_dir = " + (dir / "out").string() + "\n");
  REQUIRE(run("run " + (dir / "run.cfg").string()) == 0);
  const RunTable t = parse_run_csv(read(dir / "out" / "run.csv"));
  CHECK(t.dofs.back() > 100);
  for (std::size_t i = 0; i + 1 < t.dofs.size(); ++i) CHECK(t.dofs[i] <= 100);
}

TEST_CASE("invalid configurations produce no output") {
  const auto dir = scratch("invalid");
  write(dir / "bad.cfg", "benchmark = lshape\ncolour = blue\noutput_dir = " + (dir / "out").string() + "\n");
  CHECK(run("run " + (dir / "bad.cfg").string()) == 2);
  CHECK(!fs::exists(dir / "out"));
  write(dir / "range.cfg", "theta = 1.5\noutput_dir = " + (dir / "out").string() + "\n");
  CHECK(run("run " + (dir / "range.cfg").string()) == 2);
  CHECK(run("run " + (dir / "range.cfg").string() + " --set theta=0.5 --set p_max=1") == 2);
  CHECK(!fs::exists(dir / "out"));
  CHECK(run("run " + (dir / "missing.cfg").string()) == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("report rates") {
  const auto algebraic = summarize(parse_run_csv(synthetic_csv([](double n) { return 1.0 / std::sqrt(n); })));
  CHECK(algebraic.error_rate.slope == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(algebraic.eta_rate.slope == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(algebraic.fitted_steps == 5);
  CHECK(algebraic.effectivity_min == 2.0);

  const auto exponential =
      summarize(parse_run_csv(synthetic_csv([](double n) { return std::exp(-2 * std::cbrt(n)); })));
  CHECK(exponential.exponential.r2 >= 0.999);
  CHECK(exponential.exponential.slope == doctest::Approx(-2.0).epsilon(1e-3));

  CHECK_THROWS_AS(parse_run_csv("step,dofs\n0,10\n"), Error);
  CHECK_THROWS_AS(parse_run_csv("dofs,error,eta\n10,abc,1\n"), Error);

  const auto dir = scratch("report");
  write(dir / "a.csv", synthetic_csv([](double n) { return 1.0 / std::sqrt(n); }));
  CHECK(run("report " + (dir / "a.csv").string()) == 0);
  CHECK(fs::exists(dir / "a.plot.csv"));
  write(dir / "bad.csv", "nothing here\n");
  CHECK(run("report " + (dir / "bad.csv").string()) == 2);
}

TEST_CASE("config round trip") {
  const std::string text = "# comment\nbenchmark = square\nstrategy = hp\ntheta = 0.25\nmesh_kind = triangle\n";
  const RunConfig config = parse_config(text);
  CHECK(config.benchmark == "square");
  CHECK(config.theta == 0.25);
  const std::string once = serialize_config(config);
  CHECK(serialize_config(parse_config(once)) == once);
  CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("theta\n"), ConfigError);
}

TEST_CASE("inverse lab subcommand") {
  const auto dir = scratch("lab");
  REQUIRE(run("inverse-lab --kind quad --pmin 2 --pmax 5 --out " + (dir / "lab.csv").string()) == 0);
  const std::string csv = read(dir / "lab.csv");
  CHECK(csv.find("quad,5,trace,") != std::string::npos);
  CHECK(run("inverse-lab --kind cube") == 2);
}
