#pragma once

#include "hpdg/estimator.hpp"
#include "hpdg/mesh.hpp"

#include <limits>
#include <map>
#include <set>
#include <string>

namespace hpdg {

struct MarkingParams {
  double theta = 0.5;       // maximum strategy for h-adaptivity
  double sigma_mark = 0.7;  // selection threshold of the hp strategy
  double gamma_h = 3.0;
  double gamma_p = 0.9;

  /// Throws hpdg::Error when a parameter is outside its range.
  void validate() const;
};

/// Number of children of a refined element.
inline constexpr int kChildrenPerElement = 4;

inline constexpr double kInfinitePrediction = std::numeric_limits<double>::infinity();

/// Predicted squared indicators keyed by element id (+inf allowed).
using PredictedIndicators = std::map<int, double>;

/// Every active element with an infinite prediction.
PredictedIndicators initial_predictions(const Mesh& mesh);

struct AdaptDecision {
  std::set<int> h_refine;
  /// Subset of h_refine that the hp strategy would have p-refined but for p_max.
  std::set<int> h_fallback;
  std::set<int> p_refine;
  std::set<int> h_coarsen;
  /// Predictions of elements that keep their id (p-refined or untouched).
  PredictedIndicators new_predictions;
  /// Prediction shared by the children of each h-refined element.
  std::map<int, double> child_predictions;

  bool empty() const { return h_refine.empty() && p_refine.empty() && h_coarsen.empty(); }
};

/// Marks K iff eta_K^2 >= theta * max eta_K^2.
std::set<int> mark_h(const EstimatorReport& report, double theta);

/// hp marking with predicted indicators. p-refinement at p_max falls back to
/// h-refinement.
AdaptDecision mark_hp(const EstimatorReport& report, const PredictedIndicators& predicted,
                      const MarkingParams& params, int p_max);

struct ApplyResult {
  MeshChanges refinement;
  MeshChanges coarsening;
  /// One entry per active element after the update.
  PredictedIndicators predictions;
};

/// Executes h-refinement (children get degree max(p - 1, 2)), p-increments,
/// coarsening of p-refined families and p-smoothing, then re-keys predictions.
ApplyResult apply(Mesh& mesh, const AdaptDecision& decision, Closure closure, int p_max);

/// "step <i>: h_refine=<n> (p_max fallback <n>) p_refine=<n> coarsen=<n> dofs=<n>"
std::string decision_log_line(int step, const AdaptDecision& decision, int dofs);

}  // namespace hpdg
