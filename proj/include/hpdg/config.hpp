#pragma once

#include "hpdg/benchmarks.hpp"

#include <stdexcept>
#include <string>

namespace hpdg {

/// Invalid configuration text or values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run configuration. Defaults follow the reference parameter set.
struct RunConfig {
  std::string benchmark = "lshape";
  Strategy strategy = Strategy::H;
  int p_initial = 2;
  double theta = 0.5;
  double sigma_mark = 0.7;
  double gamma_h = 3.0;
  double gamma_p = 0.9;
  double c_sigma = 10.0;
  double c_tau = 10.0;
  int p_max = 10;
  int max_steps = 25;
  int max_dofs = 50000;
  ElementKind mesh_kind = ElementKind::Quad;
  Closure closure = Closure::OneIrregular;
  int n_per_side = 2;
  std::string output_dir = "out";

  /// Throws ConfigError when a value violates a module precondition.
  void validate() const;

  /// Sets one key from its text value. Throws ConfigError for unknown keys.
  void set(const std::string& key, const std::string& value);

  DriverOptions driver_options() const;
};

/// Parses `key = value` lines; '#' starts a comment. The result is validated.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Every key in a fixed order, one per line.
std::string serialize_config(const RunConfig& config);

}  // namespace hpdg
