#pragma once

#include <string>
#include <vector>

namespace hpdg {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line y = slope * x + intercept. Needs two distinct x values.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log(y) against log(x); all values must be positive.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Convergence columns of a run CSV.
struct RunTable {
  std::vector<double> dofs;
  std::vector<double> error;
  std::vector<double> eta;
  std::vector<double> effectivity;
};

/// Reads the columns dofs, error and eta (effectivity optional). Throws
/// hpdg::Error on malformed input.
RunTable parse_run_csv(const std::string& text);

struct ConvergenceSummary {
  int steps = 0;
  int fitted_steps = 0;   // last half of the steps
  LinearFit error_rate;   // log error vs log dofs
  LinearFit eta_rate;     // log eta vs log dofs
  LinearFit exponential;  // log error vs dofs^{1/3}
  double effectivity_min = 0.0;
  double effectivity_max = 0.0;
  double effectivity_trend = 0.0;  // log-log slope of effectivity vs dofs over the fitted steps
};

/// Rates over the last half of the steps. Needs at least two steps.
ConvergenceSummary summarize(const RunTable& table);

std::string format_summary(const std::string& source, const ConvergenceSummary& summary);

/// Plot-ready columns: dofs, dofs_cbrt, error, eta, effectivity, log10_dofs,
/// log10_error, log10_eta.
std::string plot_csv(const RunTable& table);

}  // namespace hpdg
