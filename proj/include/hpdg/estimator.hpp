#pragma once

#include "hpdg/dg_system.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hpdg {

inline constexpr int kEstimatorTerms = 6;

struct ElementIndicator {
  int id = -1;
  int level = 0;
  int degree = 0;
  /// Squared contributions: element residual, jumps of n.grad(Lap u),
  /// (D^2 u) n, (D^2 u) t, grad u and u.
  std::array<double, kEstimatorTerms> terms_sq{};

  double total_sq() const;
};

/// Residual estimator with one entry per active element, in increasing id.
class EstimatorReport {
 public:
  EstimatorReport() = default;
  explicit EstimatorReport(std::vector<ElementIndicator> elements);

  const std::vector<ElementIndicator>& elements() const { return elements_; }
  const ElementIndicator& at(int elem) const;
  bool contains(int elem) const { return index_.count(elem) > 0; }

  double eta_sq() const;
  double eta() const;
  /// Sum over elements of each squared term.
  std::array<double, kEstimatorTerms> term_sums() const;
  double max_element_sq() const;

  /// CSV with columns id, level, p, eta1_sq..eta6_sq, eta_K_sq.
  std::string to_csv() const;

 private:
  std::vector<ElementIndicator> elements_;
  std::map<int, std::size_t> index_;
};

EstimatorReport estimate(const Mesh& mesh, const DGSolution& solution, const std::function<double(const Vec2&)>& f,
                         const BoundaryData& boundary, const PenaltyParams& params);

/// eta / ||u - u_n||_dG. Throws hpdg::Error for a nonpositive error.
double effectivity(const EstimatorReport& report, double dg_error);

}  // namespace hpdg
