#include "hpdg/dg_system.hpp"

#include <cmath>

namespace hpdg {

DofMap::DofMap(const Mesh& mesh)
    : elements_(mesh.active_elements()), offset_(mesh.elements().size(), -1), count_(mesh.elements().size(), 0) {
  for (int id : elements_) {
    const auto& e = mesh.element(id);
    offset_[id] = total_;
    count_[id] = dof_count(e.kind, e.degree);
    total_ += count_[id];
  }
}

int face_degree(const Mesh& mesh, const FaceRecord& face) {
  const int p_plus = mesh.degree(face.plus_elem);
  return face.minus_elem ? std::max(p_plus, mesh.degree(*face.minus_elem)) : p_plus;
}

FacePenalty penalty_on_face(const Mesh& mesh, const FaceRecord& face, const PenaltyParams& params) {
  const double p = face_degree(mesh, face);
  const double h = face.h;
  return {params.c_sigma * std::pow(p, 6) / (h * h * h), params.c_tau * p * p / h};
}

BoundaryData BoundaryData::homogeneous() {
  BoundaryData b;
  b.g1 = [](const Vec2&) { return 0.0; };
  b.grad_g1 = [](const Vec2&) { return Vec2::Zero().eval(); };
  b.hess_g1 = [](const Vec2&) { return Mat2::Zero().eval(); };
  b.g2 = [](const Vec2&, const Vec2&) { return 0.0; };
  b.dt_g2 = [](const Vec2&, const Vec2&, const Vec2&) { return 0.0; };
  return b;
}

BoundaryData BoundaryData::from_exact(const ExactSolution& exact) {
  BoundaryData b;
  b.g1 = exact.u;
  b.grad_g1 = exact.grad;
  b.hess_g1 = exact.hess;
  b.g2 = [grad = exact.grad](const Vec2& x, const Vec2& n) { return n.dot(grad(x)); };
  // n is constant along a straight face, so d/dt (n . grad u) = n^T D^2u t.
  b.dt_g2 = [hess = exact.hess](const Vec2& x, const Vec2& n, const Vec2& t) { return n.dot(hess(x) * t); };
  return b;
}

namespace {

Derivs combine(const std::vector<Derivs>& phi, const Vector& coefficients, int offset) {
  Derivs sum;
  for (std::size_t i = 0; i < phi.size(); ++i) sum += phi[i].scaled(coefficients[offset + static_cast<int>(i)]);
  return sum;
}

double frobenius_dot(const Mat2& a, const Mat2& b) { return a.cwiseProduct(b).sum(); }

// One side of a face as seen by the jump/average operators.
struct FaceSide {
  int elem = -1;
  int offset = 0;
  int count = 0;
  double jump_sign = 1.0;
  double average_weight = 1.0;
};

}  // namespace

Derivs DGSolution::evaluate(const Mesh& mesh, int elem, const Vec2& x) const {
  const ElementEvaluator ev(mesh, elem);
  return combine(ev.evaluate(x), coefficients, dofs.offset(elem));
}

SparseMatrix assemble_operator(const Mesh& mesh, const DofMap& dofs, const PenaltyParams& params) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<Derivs> phi;

  for (int elem : mesh.active_elements()) {
    const ElementEvaluator ev(mesh, elem);
    const int n = ev.size();
    const int offset = dofs.offset(elem);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [x, w] : element_quadrature(mesh, elem, 2 * mesh.degree(elem) + 2)) {
      ev.evaluate(x, phi);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) local(i, j) += w * frobenius_dot(phi[i].hess, phi[j].hess);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        triplets.emplace_back(offset + i, offset + j, local(i, j));
        if (i != j) triplets.emplace_back(offset + j, offset + i, local(i, j));
      }
  }

  std::vector<double> jump, avg_flux;
  std::vector<Vec2> jump_grad, avg_moment;
  for (const auto& face : mesh.faces()) {
    const auto [sigma, tau] = penalty_on_face(mesh, face, params);
    const bool interior = face.minus_elem.has_value();
    std::vector<FaceSide> sides;
    sides.push_back({face.plus_elem, dofs.offset(face.plus_elem), dofs.count(face.plus_elem), 1.0,
                     interior ? 0.5 : 1.0});
    if (interior)
      sides.push_back({*face.minus_elem, dofs.offset(*face.minus_elem), dofs.count(*face.minus_elem), -1.0, 0.5});
    std::vector<ElementEvaluator> evaluators;
    int n = 0;
    for (const auto& s : sides) {
      evaluators.emplace_back(mesh, s.elem);
      n += s.count;
    }
    jump.assign(n, 0.0);
    avg_flux.assign(n, 0.0);
    jump_grad.assign(n, Vec2::Zero());
    avg_moment.assign(n, Vec2::Zero());

    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    const Vec2& normal = face.normal;
    for (const auto& [x, w] : face_quadrature(mesh, face, 2 * face_degree(mesh, face) + 2)) {
      int base = 0;
      for (std::size_t s = 0; s < sides.size(); ++s) {
        evaluators[s].evaluate(x, phi);
        for (int i = 0; i < sides[s].count; ++i) {
          jump[base + i] = sides[s].jump_sign * phi[i].value;
          jump_grad[base + i] = sides[s].jump_sign * phi[i].grad;
          avg_flux[base + i] = sides[s].average_weight * normal.dot(phi[i].grad_lap);
          avg_moment[base + i] = sides[s].average_weight * (phi[i].hess * normal);
        }
        base += sides[s].count;
      }
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          local(i, j) += w * (avg_flux[i] * jump[j] + avg_flux[j] * jump[i] - avg_moment[i].dot(jump_grad[j]) -
                              avg_moment[j].dot(jump_grad[i]) + sigma * jump[i] * jump[j] +
                              tau * jump_grad[i].dot(jump_grad[j]));
    }
    std::vector<int> global(n);
    int base = 0;
    for (const auto& s : sides) {
      for (int i = 0; i < s.count; ++i) global[base + i] = s.offset + i;
      base += s.count;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        triplets.emplace_back(global[i], global[j], local(i, j));
        if (i != j) triplets.emplace_back(global[j], global[i], local(i, j));
      }
  }

  SparseMatrix matrix(dofs.total(), dofs.total());
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return matrix;
}

Vector assemble_load(const Mesh& mesh, const DofMap& dofs, const std::function<double(const Vec2&)>& f,
                     const BoundaryData& boundary, const PenaltyParams& params) {
  Vector load = Vector::Zero(dofs.total());
  std::vector<Derivs> phi;
  for (int elem : mesh.active_elements()) {
    const ElementEvaluator ev(mesh, elem);
    const int offset = dofs.offset(elem);
    for (const auto& [x, w] : element_quadrature(mesh, elem, 2 * mesh.degree(elem) + 6)) {
      const double fx = f(x);
      if (fx == 0.0) continue;
      ev.evaluate(x, phi);
      for (int i = 0; i < ev.size(); ++i) load[offset + i] += w * fx * phi[i].value;
    }
  }
  for (const auto& face : mesh.faces()) {
    if (face.minus_elem) continue;
    const auto [sigma, tau] = penalty_on_face(mesh, face, params);
    const ElementEvaluator ev(mesh, face.plus_elem);
    const int offset = dofs.offset(face.plus_elem);
    const Vec2& n = face.normal;
    const Vec2& t = face.tangent;
    for (const auto& [x, w] : face_quadrature(mesh, face, 2 * mesh.degree(face.plus_elem) + 6)) {
      const double g1 = boundary.g1(x);
      const Vec2 grad_data = boundary.g2(x, n) * n + boundary.grad_g1(x).dot(t) * t;
      ev.evaluate(x, phi);
      for (int i = 0; i < ev.size(); ++i)
        load[offset + i] += w * (g1 * (sigma * phi[i].value + n.dot(phi[i].grad_lap)) +
                                 grad_data.dot(tau * phi[i].grad - phi[i].hess * n));
    }
  }
  return load;
}

double DGNormError::total() const { return std::sqrt(broken_hessian_sq + gradient_jump_sq + value_jump_sq); }

DGNormError dg_norm_error_parts(const Mesh& mesh, const DGSolution& solution, const ExactSolution& exact,
                                const BoundaryData& boundary, const PenaltyParams& params) {
  DGNormError err;
  std::vector<Derivs> phi;
  for (int elem : mesh.active_elements()) {
    const ElementEvaluator ev(mesh, elem);
    const int offset = solution.dofs.offset(elem);
    for (const auto& [x, w] : element_quadrature(mesh, elem, 2 * mesh.degree(elem) + 6, exact.singular_point)) {
      ev.evaluate(x, phi);
      const Derivs uh = combine(phi, solution.coefficients, offset);
      const Mat2 diff = exact.hess(x) - uh.hess;
      err.broken_hessian_sq += w * frobenius_dot(diff, diff);
    }
  }
  for (const auto& face : mesh.faces()) {
    const auto [sigma, tau] = penalty_on_face(mesh, face, params);
    const ElementEvaluator plus(mesh, face.plus_elem);
    std::optional<ElementEvaluator> minus;
    if (face.minus_elem) minus.emplace(mesh, *face.minus_elem);
    const Vec2& n = face.normal;
    const Vec2& t = face.tangent;
    for (const auto& [x, w] : face_quadrature(mesh, face, 2 * face_degree(mesh, face) + 6)) {
      plus.evaluate(x, phi);
      const Derivs up = combine(phi, solution.coefficients, solution.dofs.offset(face.plus_elem));
      double jump;
      Vec2 jump_grad;
      if (minus) {
        minus->evaluate(x, phi);
        const Derivs um = combine(phi, solution.coefficients, solution.dofs.offset(*face.minus_elem));
        jump = up.value - um.value;
        jump_grad = up.grad - um.grad;
      } else {
        jump = boundary.g1(x) - up.value;
        jump_grad = (boundary.g2(x, n) - n.dot(up.grad)) * n + (boundary.grad_g1(x) - up.grad).dot(t) * t;
      }
      err.value_jump_sq += w * sigma * jump * jump;
      err.gradient_jump_sq += w * tau * jump_grad.squaredNorm();
    }
  }
  return err;
}

double dg_norm_error(const Mesh& mesh, const DGSolution& solution, const ExactSolution& exact,
                     const BoundaryData& boundary, const PenaltyParams& params) {
  return dg_norm_error_parts(mesh, solution, exact, boundary, params).total();
}

DGSolution l2_projection(const Mesh& mesh, const std::function<double(const Vec2&)>& u) {
  DGSolution sol{DofMap(mesh), {}};
  sol.coefficients = Vector::Zero(sol.dofs.total());
  std::vector<Derivs> phi;
  for (int elem : mesh.active_elements()) {
    const ElementEvaluator ev(mesh, elem);
    const int offset = sol.dofs.offset(elem);
    // the modal basis is orthonormal on the reference element, so M_K = |det J| I
    const double inv_det = 1.0 / std::abs(ev.map().det);
    for (const auto& [x, w] : element_quadrature(mesh, elem, 2 * mesh.degree(elem) + 6)) {
      ev.evaluate(x, phi);
      const double ux = u(x);
      for (int i = 0; i < ev.size(); ++i) sol.coefficients[offset + i] += w * ux * phi[i].value * inv_det;
    }
  }
  return sol;
}

}  // namespace hpdg
