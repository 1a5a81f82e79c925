#include "hpdg/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hpdg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used == value.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  try {
    if (key == "benchmark") {
      benchmark = value;
    } else if (key == "strategy") {
      strategy = strategy_from_string(value);
    } else if (key == "p_initial") {
      p_initial = parse_int(key, value);
    } else if (key == "theta") {
      theta = parse_real(key, value);
    } else if (key == "sigma_mark") {
      sigma_mark = parse_real(key, value);
    } else if (key == "gamma_h") {
      gamma_h = parse_real(key, value);
    } else if (key == "gamma_p") {
      gamma_p = parse_real(key, value);
    } else if (key == "c_sigma") {
      c_sigma = parse_real(key, value);
    } else if (key == "c_tau") {
      c_tau = parse_real(key, value);
    } else if (key == "p_max") {
      p_max = parse_int(key, value);
    } else if (key == "max_steps") {
      max_steps = parse_int(key, value);
    } else if (key == "max_dofs") {
      max_dofs = parse_int(key, value);
    } else if (key == "mesh_kind") {
      mesh_kind = element_kind_from_string(value);
    } else if (key == "closure") {
      closure = closure_from_string(value);
    } else if (key == "n_per_side") {
      n_per_side = parse_int(key, value);
    } else if (key == "output_dir") {
      output_dir = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const Error& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

void RunConfig::validate() const {
  if (benchmark != "lshape" && benchmark != "square")
    throw ConfigError("benchmark must be lshape or square, got '" + benchmark + "'");
  if (p_initial < 2) throw ConfigError("p_initial must be at least 2");
  if (p_max < p_initial) throw ConfigError("p_max must be at least p_initial");
  if (!(c_sigma > 0.0) || !(c_tau > 0.0)) throw ConfigError("c_sigma and c_tau must be positive");
  if (max_steps < 0) throw ConfigError("max_steps must be nonnegative");
  if (max_dofs <= 0) throw ConfigError("max_dofs must be positive");
  if (n_per_side < 1) throw ConfigError("n_per_side must be at least 1");
  if (closure == Closure::RedGreen && mesh_kind != ElementKind::Triangle)
    throw ConfigError("red_green closure requires mesh_kind = triangle");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  try {
    driver_options().marking.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

DriverOptions RunConfig::driver_options() const {
  DriverOptions o;
  o.strategy = strategy;
  o.p_initial = p_initial;
  o.p_max = p_max;
  o.kind = mesh_kind;
  o.closure = closure;
  o.n_per_side = n_per_side;
  o.penalty = {c_sigma, c_tau};
  o.marking = {theta, sigma_mark, gamma_h, gamma_p};
  o.budget = {max_steps, max_dofs};
  return o;
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    config.set(key, value);
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "benchmark = " << c.benchmark << '\n'
      << "strategy = " << to_string(c.strategy) << '\n'
      << "p_initial = " << c.p_initial << '\n'
      << "theta = " << format_real(c.theta) << '\n'
      << "sigma_mark = " << format_real(c.sigma_mark) << '\n'
      << "gamma_h = " << format_real(c.gamma_h) << '\n'
      << "gamma_p = " << format_real(c.gamma_p) << '\n'
      << "c_sigma = " << format_real(c.c_sigma) << '\n'
      << "c_tau = " << format_real(c.c_tau) << '\n'
      << "p_max = " << c.p_max << '\n'
      << "max_steps = " << c.max_steps << '\n'
      << "max_dofs = " << c.max_dofs << '\n'
      << "mesh_kind = " << to_string(c.mesh_kind) << '\n'
      << "closure = " << to_string(c.closure) << '\n'
      << "n_per_side = " << c.n_per_side << '\n'
      << "output_dir = " << c.output_dir << '\n';
  return out.str();
}

}  // namespace hpdg
