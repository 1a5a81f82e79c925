#include "hpdg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hpdg {

double ElementIndicator::total_sq() const {
  double s = 0.0;
  for (double t : terms_sq) s += t;
  return s;
}

EstimatorReport::EstimatorReport(std::vector<ElementIndicator> elements) : elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < elements_.size(); ++i) index_[elements_[i].id] = i;
}

const ElementIndicator& EstimatorReport::at(int elem) const { return elements_.at(index_.at(elem)); }

double EstimatorReport::eta_sq() const {
  double s = 0.0;
  for (const auto& e : elements_) s += e.total_sq();
  return s;
}

double EstimatorReport::eta() const { return std::sqrt(eta_sq()); }

std::array<double, kEstimatorTerms> EstimatorReport::term_sums() const {
  std::array<double, kEstimatorTerms> sums{};
  for (const auto& e : elements_)
    for (int j = 0; j < kEstimatorTerms; ++j) sums[j] += e.terms_sq[j];
  return sums;
}

double EstimatorReport::max_element_sq() const {
  double m = 0.0;
  for (const auto& e : elements_) m = std::max(m, e.total_sq());
  return m;
}

std::string EstimatorReport::to_csv() const {
  std::ostringstream out;
  out << "id,level,p,eta1_sq,eta2_sq,eta3_sq,eta4_sq,eta5_sq,eta6_sq,eta_K_sq\n";
  char buf[64];
  for (const auto& e : elements_) {
    out << e.id << ',' << e.level << ',' << e.degree;
    for (double t : e.terms_sq) {
      std::snprintf(buf, sizeof buf, ",%.17g", t);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", e.total_sq());
    out << buf;
  }
  return out.str();
}

namespace {

Derivs combine(const std::vector<Derivs>& phi, const Vector& c, int offset) {
  Derivs sum;
  for (std::size_t i = 0; i < phi.size(); ++i) sum += phi[i].scaled(c[offset + static_cast<int>(i)]);
  return sum;
}

}  // namespace

EstimatorReport estimate(const Mesh& mesh, const DGSolution& solution, const std::function<double(const Vec2&)>& f,
                         const BoundaryData& boundary, const PenaltyParams& params) {
  std::vector<ElementIndicator> out;
  std::vector<int> slot(mesh.elements().size(), -1);
  std::vector<Derivs> phi;

  for (int elem : mesh.active_elements()) {
    const auto& e = mesh.element(elem);
    ElementIndicator ind;
    ind.id = elem;
    ind.level = e.level;
    ind.degree = e.degree;
    const double weight = std::pow(e.h / e.degree, 4);
    const ElementEvaluator ev(mesh, elem);
    const int offset = solution.dofs.offset(elem);
    for (const auto& [x, w] : element_quadrature(mesh, elem, 2 * e.degree + 6)) {
      ev.evaluate(x, phi);
      const double r = f(x) - combine(phi, solution.coefficients, offset).bilap;
      ind.terms_sq[0] += w * weight * r * r;
    }
    slot[elem] = static_cast<int>(out.size());
    out.push_back(ind);
  }

  for (const auto& face : mesh.faces()) {
    const auto [sigma, tau] = penalty_on_face(mesh, face, params);
    const double p = face_degree(mesh, face);
    const double hp = face.h / p;
    const Vec2& n = face.normal;
    const Vec2& t = face.tangent;
    const ElementEvaluator plus(mesh, face.plus_elem);
    std::optional<ElementEvaluator> minus;
    if (face.minus_elem) minus.emplace(mesh, *face.minus_elem);

    std::array<double, kEstimatorTerms> face_terms{};
    for (const auto& [x, w] : face_quadrature(mesh, face, 2 * static_cast<int>(p) + 4)) {
      plus.evaluate(x, phi);
      const Derivs up = combine(phi, solution.coefficients, solution.dofs.offset(face.plus_elem));
      if (minus) {
        minus->evaluate(x, phi);
        const Derivs um = combine(phi, solution.coefficients, solution.dofs.offset(*face.minus_elem));
        const double flux_jump = n.dot(up.grad_lap - um.grad_lap);
        const Mat2 hess_jump = up.hess - um.hess;
        face_terms[1] += w * hp * hp * hp * flux_jump * flux_jump;
        face_terms[2] += w * hp * (hess_jump * n).squaredNorm();
        face_terms[3] += w * hp * (hess_jump * t).squaredNorm();
        face_terms[4] += w * p * tau * (up.grad - um.grad).squaredNorm();
        face_terms[5] += w * sigma * (up.value - um.value) * (up.value - um.value);
      } else {
        const double tt = t.dot((up.hess - boundary.hess_g1(x)) * t);
        const double nt = n.dot(up.hess * t) - boundary.dt_g2(x, n, t);
        const double dn = n.dot(up.grad) - boundary.g2(x, n);
        const double dt = (up.grad - boundary.grad_g1(x)).dot(t);
        const double dv = up.value - boundary.g1(x);
        face_terms[3] += w * hp * (tt * tt + nt * nt);
        face_terms[4] += w * p * tau * (dn * dn + dt * dt);
        face_terms[5] += w * sigma * dv * dv;
      }
    }
    // Interior faces are shared half/half; boundary faces carry alpha_F = 2.
    if (minus) {
      for (int j = 1; j < kEstimatorTerms; ++j) {
        out[slot[face.plus_elem]].terms_sq[j] += 0.5 * face_terms[j];
        out[slot[*face.minus_elem]].terms_sq[j] += 0.5 * face_terms[j];
      }
    } else {
      for (int j = 3; j < kEstimatorTerms; ++j) out[slot[face.plus_elem]].terms_sq[j] += face_terms[j];
    }
  }
  return EstimatorReport(std::move(out));
}

double effectivity(const EstimatorReport& report, double dg_error) {
  if (!(dg_error > 0.0)) throw Error("effectivity needs a positive error");
  return report.eta() / dg_error;
}

}  // namespace hpdg
