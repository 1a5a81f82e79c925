#include "hpdg/report.hpp"

#include "hpdg/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace hpdg {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("line fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_number(const std::string& cell, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("line " + std::to_string(line) + ": '" + cell + "' is not a number");
}

template <typename T>
std::vector<T> tail(const std::vector<T>& v, std::size_t n) {
  return std::vector<T>(v.end() - static_cast<std::ptrdiff_t>(std::min(n, v.size())), v.end());
}

}  // namespace

RunTable parse_run_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char* required : {"dofs", "error", "eta"})
    if (!column.count(required)) throw Error(std::string("CSV lacks column '") + required + "'");
  const bool has_eff = column.count("effectivity") > 0;

  RunTable t;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw Error("line " + std::to_string(number) + ": expected " + std::to_string(header.size()) + " cells");
    const double dofs = to_number(cells[column["dofs"]], number);
    const double error = to_number(cells[column["error"]], number);
    const double eta = to_number(cells[column["eta"]], number);
    if (!(dofs > 0.0) || !(error > 0.0) || !(eta > 0.0))
      throw Error("line " + std::to_string(number) + ": dofs, error and eta must be positive");
    t.dofs.push_back(dofs);
    t.error.push_back(error);
    t.eta.push_back(eta);
    t.effectivity.push_back(has_eff ? to_number(cells[column["effectivity"]], number) : eta / error);
  }
  return t;
}

ConvergenceSummary summarize(const RunTable& t) {
  const std::size_t n = t.dofs.size();
  if (n < 2) throw Error("a convergence summary needs at least two steps");
  ConvergenceSummary s;
  s.steps = static_cast<int>(n);
  const std::size_t k = std::max<std::size_t>(2, (n + 1) / 2);
  s.fitted_steps = static_cast<int>(k);
  const auto dofs = tail(t.dofs, k);
  s.error_rate = fit_loglog(dofs, tail(t.error, k));
  s.eta_rate = fit_loglog(dofs, tail(t.eta, k));
  std::vector<double> cbrt, log_error;
  for (std::size_t i = 0; i < n; ++i) {
    cbrt.push_back(std::cbrt(t.dofs[i]));
    log_error.push_back(std::log(t.error[i]));
  }
  s.exponential = fit_line(cbrt, log_error);
  const auto eff = tail(t.effectivity, k);
  s.effectivity_min = *std::min_element(eff.begin(), eff.end());
  s.effectivity_max = *std::max_element(eff.begin(), eff.end());
  s.effectivity_trend = fit_loglog(dofs, eff).slope;
  return s;
}

std::string format_summary(const std::string& source, const ConvergenceSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s: steps=%d fitted=%d error_rate=%.4f (R2 %.4f) eta_rate=%.4f (R2 %.4f) "
                "exp_slope=%.4f (R2 %.4f) effectivity min=%.4f max=%.4f trend=%.4f\n",
                source.c_str(), s.steps, s.fitted_steps, s.error_rate.slope, s.error_rate.r2, s.eta_rate.slope,
                s.eta_rate.r2, s.exponential.slope, s.exponential.r2, s.effectivity_min, s.effectivity_max,
                s.effectivity_trend);
  return buf;
}

std::string plot_csv(const RunTable& t) {
  std::ostringstream out;
  out << "dofs,dofs_cbrt,error,eta,effectivity,log10_dofs,log10_error,log10_eta\n";
  char buf[256];
  for (std::size_t i = 0; i < t.dofs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.0f,%.10g,%.10e,%.10e,%.10g,%.10g,%.10g,%.10g\n", t.dofs[i],
                  std::cbrt(t.dofs[i]), t.error[i], t.eta[i], t.effectivity[i], std::log10(t.dofs[i]),
                  std::log10(t.error[i]), std::log10(t.eta[i]));
    out << buf;
  }
  return out.str();
}

}  // namespace hpdg
