#pragma once

#include "hpdg/basis.hpp"
#include "hpdg/mesh.hpp"

#include <optional>
#include <vector>

namespace hpdg {

/// Value and physical derivatives of a function at one point.
struct Derivs {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
  Vec2 grad_lap = Vec2::Zero();  // gradient of the Laplacian
  double bilap = 0.0;            // biharmonic operator

  static Derivs from_jet(const Jet& jet);
  Derivs& operator+=(const Derivs& other);
  Derivs scaled(double s) const;
};

/// Evaluates the modal basis of an element at physical points.
class ElementEvaluator {
 public:
  ElementEvaluator(const Mesh& mesh, int elem);

  int size() const { return basis_.size(); }
  const AffineMap& map() const { return map_; }

  void evaluate(const Vec2& x, std::vector<Derivs>& out) const;
  std::vector<Derivs> evaluate(const Vec2& x) const;

 private:
  ReferenceBasis basis_;
  AffineMap map_;
};

inline constexpr int kSingularLevels = 8;  // graded sub-cell levels towards a singular corner

struct WeightedPoint {
  Vec2 x;
  double weight;
};

/// Physical quadrature points of an element, exact to `order` for polynomials.
/// When `singular_vertex` coincides with a vertex of the element the rule is
/// built on `levels` dyadic sub-cells graded towards that vertex.
std::vector<WeightedPoint> element_quadrature(const Mesh& mesh, int elem, int order,
                                              const std::optional<Vec2>& singular_vertex = std::nullopt,
                                              int levels = kSingularLevels);

/// Gauss points along a face, weights scaled by the face length.
std::vector<WeightedPoint> face_quadrature(const Mesh& mesh, const FaceRecord& face, int order);

}  // namespace hpdg
