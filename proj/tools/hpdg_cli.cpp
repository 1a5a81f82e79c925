// Command-line entry point: adaptive benchmark runs, convergence reports and
// the inverse-estimate lab.

#include "hpdg/benchmarks.hpp"
#include "hpdg/config.hpp"
#include "hpdg/inverse_lab.hpp"
#include "hpdg/report.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hpdg;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

RunConfig configure(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig config = load_config(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not key=value");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  config.validate();
  return config;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string step_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%03d.txt", step);
  return buf;
}

int run_command(const std::string& path, const std::vector<std::string>& overrides) {
  const RunConfig config = configure(path, overrides);
  const fs::path out_dir = config.output_dir;
  fs::create_directories(out_dir / "meshes");
  write_file(out_dir / "config.txt", serialize_config(config));

  const auto problem = benchmark_by_name(config.benchmark);
  const auto record = adaptive_driver(problem, config.driver_options(), [&](const StepView& v) {
    write_file(out_dir / "meshes" / step_name(v.step), v.mesh.dump());
    std::cout << decision_log_line(v.step, v.decision, v.solution.dofs.total()) << '\n';
  });
  write_file(out_dir / "run.csv", record.to_csv());
  write_file(out_dir / "run.json", record.to_json());
  if (record.partial) {
    std::cerr << "solver failure: " << record.failure << '\n';
    return kSolverFailure;
  }
  return kOk;
}

int report_command(const std::vector<std::string>& paths, const std::string& plot_dir) {
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    const RunTable table = parse_run_csv(text.str());
    std::cout << format_summary(path, summarize(table));
    fs::path plot = fs::path(path).replace_extension(".plot.csv");
    if (!plot_dir.empty()) {
      fs::create_directories(plot_dir);
      plot = fs::path(plot_dir) / plot.filename();
    }
    write_file(plot, plot_csv(table));
  }
  return kOk;
}

int inverse_lab_command(const std::string& kind_name, int pmin, int pmax, const std::string& out_path) {
  std::vector<ElementKind> kinds;
  if (kind_name == "both") {
    kinds = {ElementKind::Quad, ElementKind::Triangle};
  } else {
    kinds = {element_kind_from_string(kind_name)};
  }
  if (pmin < 0 || pmax < pmin + 3) throw Error("need 0 <= pmin and at least four degrees");
  std::vector<ConstantSeries> series;
  for (auto kind : kinds) {
    series.push_back(trace_series(kind, pmin, pmax));
    series.push_back(h1_series(kind, pmin, pmax));
    series.push_back(bubble_series(kind, pmin, pmax, 0.0, 1.0));
    for (auto& s : extension_series(kind, pmin, pmax)) series.push_back(std::move(s));
  }
  const std::string csv = inverse_lab_csv(series);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  return kOk;
}

int mesh_dump_command(const std::string& path, int step) {
  RunConfig config = configure(path, {});
  if (step < 0) throw ConfigError("step must be nonnegative");
  config.max_steps = step;
  std::string dump;
  const auto record = adaptive_driver(benchmark_by_name(config.benchmark), config.driver_options(),
                                      [&](const StepView& v) {
                                        if (v.step == step) dump = v.mesh.dump();
                                      });
  if (record.partial) {
    std::cerr << "solver failure: " << record.failure << '\n';
    return kSolverFailure;
  }
  if (dump.empty()) throw Error("run stopped before step " + std::to_string(step));
  std::cout << dump;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hp-adaptive interior penalty dG for the biharmonic problem"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Run an adaptive benchmark from a config file");
  run->add_option("config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--set", overrides, "Override a config key: key=value");

  std::vector<std::string> csv_paths;
  std::string plot_dir;
  auto* report = app.add_subcommand("report", "Summarise convergence of run CSV files");
  report->add_option("csv", csv_paths, "run.csv files")->required();
  report->add_option("--plot-dir", plot_dir, "Directory for the plot CSVs (default: next to each input)");

  std::string kind = "both";
  int pmin = 2, pmax = 10;
  std::string lab_out;
  auto* lab = app.add_subcommand("inverse-lab", "Inverse and extension constants over a degree sweep");
  lab->add_option("--kind", kind, "quad, triangle or both");
  lab->add_option("--pmin", pmin, "Smallest degree");
  lab->add_option("--pmax", pmax, "Largest degree");
  lab->add_option("--out", lab_out, "Output CSV (default: stdout)");

  std::string dump_config;
  int dump_step = 0;
  auto* dump = app.add_subcommand("mesh-dump", "Print the mesh of one adaptive step");
  dump->add_option("config", dump_config, "Config file")->required();
  dump->add_option("--step", dump_step, "Step index")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return run_command(config_path, overrides);
    if (*report) return report_command(csv_paths, plot_dir);
    if (*lab) return inverse_lab_command(kind, pmin, pmax, lab_out);
    if (*dump) return mesh_dump_command(dump_config, dump_step);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
