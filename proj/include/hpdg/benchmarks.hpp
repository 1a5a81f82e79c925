#pragma once

#include "hpdg/adaptivity.hpp"
#include "hpdg/dg_system.hpp"
#include "hpdg/estimator.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace hpdg {

struct BenchmarkProblem {
  std::string name;
  Domain domain = Domain::UnitSquare;
  std::function<double(const Vec2&)> f;
  ExactSolution exact;
  BoundaryData boundary;
};

/// u = r^{4/3} sin(4 theta / 3) on the L-shape, f = 0, data from u.
BenchmarkProblem lshape_singular();

/// u = (sin(pi x) sin(pi y))^2 on the unit square, clamped.
BenchmarkProblem square_smooth();

/// Looks a problem up by name ("lshape" or "square").
BenchmarkProblem benchmark_by_name(const std::string& name);

enum class Strategy { H, HP };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);

struct Budget {
  int max_steps = 25;
  int max_dofs = 50000;
};

struct DriverOptions {
  Strategy strategy = Strategy::H;
  int p_initial = 2;
  int p_max = 10;
  ElementKind kind = ElementKind::Quad;
  Closure closure = Closure::OneIrregular;
  int n_per_side = 2;
  PenaltyParams penalty;
  MarkingParams marking;
  Budget budget;
};

struct StepRecord {
  int step = 0;
  int dofs = 0;
  double error = 0.0;
  double eta = 0.0;
  double effectivity = 0.0;
  std::array<double, kEstimatorTerms> eta_terms{};  // sqrt of the summed squared terms
  int n_elements = 0;
  int p_min = 0;
  int p_max = 0;
  int n_h_refine = 0;  // decisions taken after this step's solve
  int n_h_fallback = 0;  // h-refinements forced by p_max
  int n_p_refine = 0;
  int n_coarsen = 0;
  double seconds = 0.0;
};

struct RunRecord {
  std::string problem;
  DriverOptions options;
  std::vector<StepRecord> steps;
  bool partial = false;  // the loop was aborted by a solver failure
  std::string failure;

  /// Columns: step, dofs, error, eta, effectivity, eta1..eta6, n_elements,
  /// p_min, p_max, n_h_refine, n_h_fallback, n_p_refine, n_coarsen, seconds.
  std::string to_csv(bool with_timing = true) const;
  std::string to_json() const;
};

/// State handed to the observer after the estimate of each step.
struct StepView {
  int step;
  const Mesh& mesh;
  const DGSolution& solution;
  const EstimatorReport& report;
  const AdaptDecision& decision;  // empty on the final step
};

using StepObserver = std::function<void(const StepView&)>;

/// One solve on a given mesh: assembly, solve, estimate and dG error.
struct SolveOutcome {
  DGSolution solution;
  EstimatorReport report;
  double error = 0.0;
};

SolveOutcome solve_and_estimate(const Mesh& mesh, const BenchmarkProblem& problem, const PenaltyParams& penalty);

/// solve -> estimate -> mark -> refine until the budget is exhausted or eta < 1e-12.
RunRecord adaptive_driver(const BenchmarkProblem& problem, const DriverOptions& options,
                          const StepObserver& observer = {});

}  // namespace hpdg
