#pragma once

#include "hpdg/evaluation.hpp"
#include "hpdg/mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <vector>

namespace hpdg {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Contiguous dof ranges of the active elements, in increasing element id.
class DofMap {
 public:
  DofMap() = default;
  explicit DofMap(const Mesh& mesh);

  int offset(int elem) const { return offset_.at(elem); }
  int count(int elem) const { return count_.at(elem); }
  int total() const { return total_; }
  const std::vector<int>& elements() const { return elements_; }

 private:
  std::vector<int> elements_;
  std::vector<int> offset_;
  std::vector<int> count_;
  int total_ = 0;
};

struct PenaltyParams {
  double c_sigma = 10.0;
  double c_tau = 10.0;
};

struct FacePenalty {
  double sigma = 0.0;
  double tau = 0.0;
};

/// p on a face: max of the neighbours on interior faces, p_K on boundary faces.
int face_degree(const Mesh& mesh, const FaceRecord& face);

/// sigma = c_sigma p^6 / h^3, tau = c_tau p^2 / h with the facewise p and h.
FacePenalty penalty_on_face(const Mesh& mesh, const FaceRecord& face, const PenaltyParams& params);

/// Exact solution callbacks used for boundary data and error measurement.
struct ExactSolution {
  std::function<double(const Vec2&)> u;
  std::function<Vec2(const Vec2&)> grad;
  std::function<Mat2(const Vec2&)> hess;
  /// Point where the Hessian is singular; element integrals touching it are graded.
  std::optional<Vec2> singular_point;
};

/// Clamped boundary data u = g1, n . grad u = g2, with the tangential
/// derivatives the boundary terms need.
struct BoundaryData {
  std::function<double(const Vec2&)> g1;
  std::function<Vec2(const Vec2&)> grad_g1;  // only the tangential part is used
  std::function<Mat2(const Vec2&)> hess_g1;  // only t^T H t is used
  std::function<double(const Vec2& x, const Vec2& n)> g2;
  /// Derivative of g2 along the tangent t of a straight face.
  std::function<double(const Vec2& x, const Vec2& n, const Vec2& t)> dt_g2;

  static BoundaryData homogeneous();
  static BoundaryData from_exact(const ExactSolution& exact);
};

/// Coefficients of a broken polynomial together with the dof layout they refer to.
struct DGSolution {
  DofMap dofs;
  Vector coefficients;

  Derivs evaluate(const Mesh& mesh, int elem, const Vec2& x) const;
};

/// Interior penalty operator of the Hessian formulation, lifting terms written
/// as face integrals. Quadrature order 2p+2 on cells and faces.
SparseMatrix assemble_operator(const Mesh& mesh, const DofMap& dofs, const PenaltyParams& params);

/// (f, v) plus the boundary data terms; order 2p+6 on cells and faces.
Vector assemble_load(const Mesh& mesh, const DofMap& dofs, const std::function<double(const Vec2&)>& f,
                     const BoundaryData& boundary, const PenaltyParams& params);

/// dG-norm error components of u - u_n.
struct DGNormError {
  double broken_hessian_sq = 0.0;
  double gradient_jump_sq = 0.0;
  double value_jump_sq = 0.0;

  double total() const;
};

DGNormError dg_norm_error_parts(const Mesh& mesh, const DGSolution& solution, const ExactSolution& exact,
                                const BoundaryData& boundary, const PenaltyParams& params);

double dg_norm_error(const Mesh& mesh, const DGSolution& solution, const ExactSolution& exact,
                     const BoundaryData& boundary, const PenaltyParams& params);

/// L2 projection of a function onto the dG space (used to build discrete
/// interpolants in tests and diagnostics).
DGSolution l2_projection(const Mesh& mesh, const std::function<double(const Vec2&)>& u);

}  // namespace hpdg
