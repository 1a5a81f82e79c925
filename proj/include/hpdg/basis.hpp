#pragma once

#include "hpdg/jet.hpp"
#include "hpdg/types.hpp"

#include <span>
#include <vector>

namespace hpdg {

/// Number of modes of P_p on a triangle or Q_p on a quadrilateral.
int dof_count(ElementKind kind, int p);

/// Positive-weight rule on the reference element: the unit square [0,1]^2 or
/// the triangle with vertices (0,0), (1,0), (0,1).
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

struct QuadratureRule1D {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0,1].
QuadratureRule1D gauss_legendre(int n);

/// Gauss-Legendre rule on [0,1] exact for polynomials of degree `order`.
QuadratureRule1D gauss_for_order(int order);

/// Tensor Gauss rule (quad) or collapsed Gauss rule (triangle) exact to `order`.
QuadratureRule quadrature(ElementKind kind, int order);

/// Reference measure: 1 for the unit square, 1/2 for the reference triangle.
double reference_measure(ElementKind kind);

bool inside_reference(ElementKind kind, const Vec2& point, double tol = 1e-12);

/// L2-orthonormal modal basis on the reference element.
///
/// Quadrilaterals use tensor products of shifted Legendre polynomials; mode
/// (i, j) has index i + (p + 1) j. Triangles use the Dubiner basis ordered by
/// total degree, built from the homogenised Legendre recurrence so that it is a
/// polynomial everywhere (including the collapsed vertex).
class ReferenceBasis {
 public:
  ReferenceBasis(ElementKind kind, int p);

  ElementKind kind() const { return kind_; }
  int degree() const { return p_; }
  int size() const { return dof_count(kind_, p_); }

  /// Evaluates every mode with the reference coordinates given as jets. Seeding
  /// xi/eta with Jet::affine(x, 1, 0) / (y, 0, 1) yields reference derivatives;
  /// seeding them with the inverse element map yields physical derivatives.
  void evaluate(const Jet& xi, const Jet& eta, std::span<Jet> out) const;

  std::vector<Jet> evaluate(const Jet& xi, const Jet& eta) const;

  /// Reference-coordinate jets of every mode at `point`.
  std::vector<Jet> evaluate_reference(const Vec2& point) const;

 private:
  void evaluate_quad(const Jet& xi, const Jet& eta, std::span<Jet> out) const;
  void evaluate_triangle(const Jet& xi, const Jet& eta, std::span<Jet> out) const;

  ElementKind kind_;
  int p_;
};

/// Derivative tables: value(i, q, a, b) is d^{a+b}/dx^a dy^b of mode i at point q.
class BasisTable {
 public:
  BasisTable(int n_basis, int n_points, int max_deriv);

  int n_basis() const { return n_basis_; }
  int n_points() const { return n_points_; }
  int max_deriv() const { return max_deriv_; }

  double value(int basis, int point, int a, int b) const;
  void set(int basis, int point, const Jet& jet);

 private:
  int n_basis_;
  int n_points_;
  int max_deriv_;
  std::vector<double> data_;
};

/// Tables of modal values and partial derivatives up to `max_deriv` (0..3)
/// at reference points. Throws hpdg::Error for p < 0, max_deriv outside 0..3,
/// or points outside the reference element.
BasisTable eval_basis(ElementKind kind, int p, std::span<const Vec2> points, int max_deriv);

}  // namespace hpdg
