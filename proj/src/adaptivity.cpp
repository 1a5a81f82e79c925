#include "hpdg/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace hpdg {

void MarkingParams::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta must lie in (0, 1]");
  if (!(sigma_mark > 0.0 && sigma_mark <= 1.0)) throw Error("sigma_mark must lie in (0, 1]");
  if (!(gamma_h > 0.0)) throw Error("gamma_h must be positive");
  if (!(gamma_p > 0.0 && gamma_p < 1.0)) throw Error("gamma_p must lie in (0, 1)");
}

PredictedIndicators initial_predictions(const Mesh& mesh) {
  PredictedIndicators pred;
  for (int id : mesh.active_elements()) pred[id] = kInfinitePrediction;
  return pred;
}

std::set<int> mark_h(const EstimatorReport& report, double theta) {
  const double threshold = theta * report.max_element_sq();
  std::set<int> marked;
  for (const auto& e : report.elements())
    if (e.total_sq() >= threshold) marked.insert(e.id);
  return marked;
}

AdaptDecision mark_hp(const EstimatorReport& report, const PredictedIndicators& predicted,
                      const MarkingParams& params, int p_max) {
  if (p_max < 2) throw Error("p_max must be at least 2");
  AdaptDecision d;
  const double threshold = params.sigma_mark * report.max_element_sq();
  for (const auto& e : report.elements()) {
    const double eta_sq = e.total_sq();
    const auto it = predicted.find(e.id);
    if (it == predicted.end()) throw Error("no prediction for element " + std::to_string(e.id));
    const double pred = it->second;
    if (eta_sq < threshold) {
      d.new_predictions[e.id] = pred;
      continue;
    }
    if (eta_sq >= pred || e.degree >= p_max) {
      d.h_refine.insert(e.id);
      if (eta_sq < pred) d.h_fallback.insert(e.id);
      d.child_predictions[e.id] =
          params.gamma_h / kChildrenPerElement * std::pow(0.5, 2.0 * e.degree - 2.0) * eta_sq;
    } else {
      d.p_refine.insert(e.id);
      d.h_coarsen.insert(e.id);
      d.new_predictions[e.id] = params.gamma_p * eta_sq;
    }
  }
  return d;
}

namespace {

void for_active_descendants(const Mesh& mesh, int elem, const std::function<void(int)>& fn) {
  const auto& e = mesh.element(elem);
  if (e.active) {
    fn(elem);
    return;
  }
  for (int c : e.children) for_active_descendants(mesh, c, fn);
}

}  // namespace

ApplyResult apply(Mesh& mesh, const AdaptDecision& decision, Closure closure, int p_max) {
  ApplyResult result;
  if (decision.empty()) {
    result.predictions = decision.new_predictions;
    for (int id : mesh.active_elements())
      if (!result.predictions.count(id)) result.predictions[id] = kInfinitePrediction;
    return result;
  }

  if (!decision.h_refine.empty()) {
    result.refinement = mesh.refine(decision.h_refine, closure);
    for (int id : decision.h_refine) {
      const int target = mesh.element(id).green ? *mesh.element(id).parent : id;
      const int p = std::max(mesh.element(id).degree - 1, 2);
      for_active_descendants(mesh, target, [&](int c) { mesh.set_degree(c, p); });
    }
  }

  for (int id : decision.p_refine)
    for_active_descendants(mesh, id, [&](int c) { mesh.set_degree(c, std::min(mesh.degree(c) + 1, p_max)); });

  std::set<int> coarsen;
  for (int id : decision.h_coarsen)
    if (mesh.element(id).active) coarsen.insert(id);
  if (!coarsen.empty()) result.coarsening = mesh.coarsen(coarsen);
  mesh.smooth_degrees();

  // Re-key predictions onto the active elements.
  auto& pred = result.predictions;
  for (int id : mesh.active_elements()) {
    if (const auto it = decision.new_predictions.find(id); it != decision.new_predictions.end()) {
      pred[id] = it->second;
      continue;
    }
    if (const auto it = result.coarsening.coarsened.find(id); it != result.coarsening.coarsened.end()) {
      double m = 0.0;
      for (int c : it->second) {
        const auto ci = decision.new_predictions.find(c);
        m = std::max(m, ci == decision.new_predictions.end() ? kInfinitePrediction : ci->second);
      }
      pred[id] = m;
      continue;
    }
    const auto& parent = mesh.element(id).parent;
    if (parent && decision.child_predictions.count(*parent) && !result.refinement.closure_refined.count(*parent)) {
      pred[id] = decision.child_predictions.at(*parent);
      continue;
    }
    pred[id] = kInfinitePrediction;
  }
  return result;
}

std::string decision_log_line(int step, const AdaptDecision& decision, int dofs) {
  std::ostringstream out;
  out << "step " << step << ": h_refine=" << decision.h_refine.size() << " (p_max fallback "
      << decision.h_fallback.size() << ") p_refine=" << decision.p_refine.size()
      << " coarsen=" << decision.h_coarsen.size() << " dofs=" << dofs;
  return out.str();
}

}  // namespace hpdg
