#include "hpdg/basis.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace hpdg {

std::string to_string(ElementKind kind) { return kind == ElementKind::Quad ? "quad" : "triangle"; }

ElementKind element_kind_from_string(const std::string& name) {
  if (name == "quad" || name == "Quad") return ElementKind::Quad;
  if (name == "triangle" || name == "tri" || name == "Triangle") return ElementKind::Triangle;
  throw Error("unknown element kind '" + name + "'");
}

int dof_count(ElementKind kind, int p) {
  if (p < 0) throw Error("polynomial degree must be nonnegative");
  return kind == ElementKind::Quad ? (p + 1) * (p + 1) : (p + 1) * (p + 2) / 2;
}

double reference_measure(ElementKind kind) { return kind == ElementKind::Quad ? 1.0 : 0.5; }

bool inside_reference(ElementKind kind, const Vec2& x, double tol) {
  if (x[0] < -tol || x[1] < -tol) return false;
  if (kind == ElementKind::Quad) return x[0] <= 1.0 + tol && x[1] <= 1.0 + tol;
  return x[0] + x[1] <= 1.0 + tol;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

QuadratureRule1D compute_gauss_legendre(int n) {
  QuadratureRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    // map [-1,1] -> [0,1]; store in ascending order
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

QuadratureRule1D gauss_legendre(int n) {
  if (n < 1) throw Error("Gauss rule needs at least one point");
  static std::mutex mutex;
  static std::map<int, QuadratureRule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

QuadratureRule1D gauss_for_order(int order) { return gauss_legendre(std::max(order, 0) / 2 + 1); }

QuadratureRule quadrature(ElementKind kind, int order) {
  if (order < 0) order = 0;
  QuadratureRule rule;
  if (kind == ElementKind::Quad) {
    const auto g = gauss_for_order(order);
    for (std::size_t j = 0; j < g.size(); ++j) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        rule.points.emplace_back(g.points[i], g.points[j]);
        rule.weights.push_back(g.weights[i] * g.weights[j]);
      }
    }
    return rule;
  }
  // Collapsed (Duffy) rule: x = u (1 - v), y = v, dx dy = (1 - v) du dv.
  const auto gu = gauss_for_order(order);
  const auto gv = gauss_for_order(order + 1);
  for (std::size_t j = 0; j < gv.size(); ++j) {
    const double v = gv.points[j];
    for (std::size_t i = 0; i < gu.size(); ++i) {
      rule.points.emplace_back(gu.points[i] * (1.0 - v), v);
      rule.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - v));
    }
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Modal bases

ReferenceBasis::ReferenceBasis(ElementKind kind, int p) : kind_(kind), p_(p) {
  if (p < 0) throw Error("polynomial degree must be nonnegative");
}

std::vector<Jet> ReferenceBasis::evaluate(const Jet& xi, const Jet& eta) const {
  std::vector<Jet> out(size());
  evaluate(xi, eta, out);
  return out;
}

std::vector<Jet> ReferenceBasis::evaluate_reference(const Vec2& point) const {
  return evaluate(Jet::affine(point[0], 1.0, 0.0), Jet::affine(point[1], 0.0, 1.0));
}

void ReferenceBasis::evaluate(const Jet& xi, const Jet& eta, std::span<Jet> out) const {
  if (static_cast<int>(out.size()) < size()) throw Error("output span too small for basis");
  if (kind_ == ElementKind::Quad)
    evaluate_quad(xi, eta, out);
  else
    evaluate_triangle(xi, eta, out);
}

namespace {

// Orthonormal shifted Legendre polynomials sqrt(2n+1) L_n(2t-1) on [0,1].
void legendre_jets(int p, const Jet& t, std::vector<Jet>& out) {
  out.assign(p + 1, Jet{});
  const Jet s = 2.0 * t - Jet::constant(1.0);
  out[0] = Jet::constant(1.0);
  if (p >= 1) out[1] = s;
  for (int n = 1; n < p; ++n)
    out[n + 1] = ((2.0 * n + 1.0) * (s * out[n]) - n * out[n - 1]) * (1.0 / (n + 1.0));
  for (int n = 0; n <= p; ++n) out[n] *= std::sqrt(2.0 * n + 1.0);
}

}  // namespace

void ReferenceBasis::evaluate_quad(const Jet& xi, const Jet& eta, std::span<Jet> out) const {
  std::vector<Jet> lx, ly;
  legendre_jets(p_, xi, lx);
  legendre_jets(p_, eta, ly);
  for (int j = 0; j <= p_; ++j)
    for (int i = 0; i <= p_; ++i) out[i + (p_ + 1) * j] = lx[i] * ly[j];
}

void ReferenceBasis::evaluate_triangle(const Jet& xi, const Jet& eta, std::span<Jet> out) const {
  const Jet one = Jet::constant(1.0);
  const Jet a = 2.0 * xi + eta - one;  // (1 - y) * collapsed coordinate
  const Jet b = one - eta;
  const Jet b2 = b * b;
  const Jet t = 2.0 * eta - one;

  // Homogenised Legendre: q_i = (1-y)^i P_i(a / (1-y))
  std::vector<Jet> q(p_ + 1);
  q[0] = one;
  if (p_ >= 1) q[1] = a;
  for (int n = 1; n < p_; ++n)
    q[n + 1] = ((2.0 * n + 1.0) * (a * q[n]) - n * (b2 * q[n - 1])) * (1.0 / (n + 1.0));

  std::vector<Jet> jac(p_ + 1);
  int index = 0;
  for (int degree = 0; degree <= p_; ++degree) {
    for (int i = degree; i >= 0; --i) {
      const int j = degree - i;
      // Jacobi P_j^{(2i+1, 0)}(t)
      const double alpha = 2.0 * i + 1.0;
      jac[0] = one;
      if (j >= 1) jac[1] = 0.5 * ((alpha + 2.0) * t + Jet::constant(alpha));
      for (int n = 2; n <= j; ++n) {
        const double c = 2.0 * n + alpha;
        const double a1 = 2.0 * n * (n + alpha) * (c - 2.0);
        const double a2 = (c - 1.0) * alpha * alpha;
        const double a3 = (c - 1.0) * c * (c - 2.0);
        const double a4 = 2.0 * (n + alpha - 1.0) * (n - 1.0) * c;
        jac[n] = ((a2 * one + a3 * t) * jac[n - 1] - a4 * jac[n - 2]) * (1.0 / a1);
      }
      const double norm = std::sqrt(2.0 * (2.0 * i + 1.0) * (i + j + 1.0));
      out[index++] = (q[i] * jac[j]) * norm;
    }
  }
}

// ---------------------------------------------------------------------------

BasisTable::BasisTable(int n_basis, int n_points, int max_deriv)
    : n_basis_(n_basis),
      n_points_(n_points),
      max_deriv_(max_deriv),
      data_(static_cast<std::size_t>(n_basis) * n_points * kJetSize, 0.0) {}

double BasisTable::value(int basis, int point, int a, int b) const {
  if (a < 0 || b < 0 || a + b > max_deriv_) throw Error("derivative order not tabulated");
  const std::size_t base = (static_cast<std::size_t>(basis) * n_points_ + point) * kJetSize;
  return data_[base + jet_index(a, b)];
}

void BasisTable::set(int basis, int point, const Jet& jet) {
  const std::size_t base = (static_cast<std::size_t>(basis) * n_points_ + point) * kJetSize;
  for (int n = 0; n <= max_deriv_; ++n)
    for (int b = 0; b <= n; ++b) data_[base + jet_index(n - b, b)] = jet.derivative(n - b, b);
}

BasisTable eval_basis(ElementKind kind, int p, std::span<const Vec2> points, int max_deriv) {
  if (p < 0) throw Error("polynomial degree must be nonnegative");
  if (max_deriv < 0 || max_deriv > 3) throw Error("max_deriv must lie in 0..3");
  const ReferenceBasis basis(kind, p);
  BasisTable table(basis.size(), static_cast<int>(points.size()), max_deriv);
  for (std::size_t q = 0; q < points.size(); ++q) {
    if (!inside_reference(kind, points[q], 1e-10)) throw Error("evaluation point outside the reference element");
    const auto jets = basis.evaluate_reference(points[q]);
    for (int i = 0; i < basis.size(); ++i) table.set(i, static_cast<int>(q), jets[i]);
  }
  return table;
}

}  // namespace hpdg
