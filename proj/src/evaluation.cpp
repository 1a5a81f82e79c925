#include "hpdg/evaluation.hpp"

#include <array>

namespace hpdg {

Derivs Derivs::from_jet(const Jet& j) {
  Derivs d;
  d.value = j.value();
  d.grad = Vec2(j.derivative(1, 0), j.derivative(0, 1));
  d.hess << j.derivative(2, 0), j.derivative(1, 1), j.derivative(1, 1), j.derivative(0, 2);
  d.grad_lap = Vec2(j.derivative(3, 0) + j.derivative(1, 2), j.derivative(2, 1) + j.derivative(0, 3));
  d.bilap = j.derivative(4, 0) + 2.0 * j.derivative(2, 2) + j.derivative(0, 4);
  return d;
}

Derivs& Derivs::operator+=(const Derivs& o) {
  value += o.value;
  grad += o.grad;
  hess += o.hess;
  grad_lap += o.grad_lap;
  bilap += o.bilap;
  return *this;
}

Derivs Derivs::scaled(double s) const {
  Derivs d = *this;
  d.value *= s;
  d.grad *= s;
  d.hess *= s;
  d.grad_lap *= s;
  d.bilap *= s;
  return d;
}

ElementEvaluator::ElementEvaluator(const Mesh& mesh, int elem)
    : basis_(mesh.element(elem).kind, mesh.element(elem).degree), map_(mesh.element_map(elem)) {}

void ElementEvaluator::evaluate(const Vec2& x, std::vector<Derivs>& out) const {
  // Reference coordinates as affine jets of the physical coordinates.
  const Vec2 ref = map_.to_reference(x);
  const Mat2& inv = map_.inverse;
  const Jet xi = Jet::affine(ref[0], inv(0, 0), inv(0, 1));
  const Jet eta = Jet::affine(ref[1], inv(1, 0), inv(1, 1));
  thread_local std::vector<Jet> jets;
  jets.resize(basis_.size());
  basis_.evaluate(xi, eta, jets);
  out.resize(jets.size());
  for (std::size_t i = 0; i < jets.size(); ++i) out[i] = Derivs::from_jet(jets[i]);
}

std::vector<Derivs> ElementEvaluator::evaluate(const Vec2& x) const {
  std::vector<Derivs> out;
  evaluate(x, out);
  return out;
}

namespace {

// Reference sub-cell given by its own affine map from the reference element.
struct SubCell {
  Vec2 origin;
  Mat2 jacobian;
};

void append_rule(const QuadratureRule& rule, const AffineMap& map, const SubCell& cell,
                 std::vector<WeightedPoint>& out) {
  const double scale = std::abs(map.det) * std::abs(cell.jacobian.determinant());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 ref = cell.origin + cell.jacobian * rule.points[q];
    out.push_back({map.to_physical(ref), rule.weights[q] * scale});
  }
}

// Children of a reference sub-cell; the first child always contains the
// sub-cell's own origin corner.
std::vector<SubCell> split(ElementKind kind, const SubCell& c) {
  const Mat2 half = 0.5 * c.jacobian;
  const Vec2 e0 = half.col(0), e1 = half.col(1);
  if (kind == ElementKind::Quad)
    return {{c.origin, half}, {c.origin + e0, half}, {c.origin + e1, half}, {c.origin + e0 + e1, half}};
  Mat2 flipped;
  flipped.col(0) = -e0;
  flipped.col(1) = -e1;
  return {{c.origin, half}, {c.origin + e0, half}, {c.origin + e1, half}, {c.origin + e0 + e1, flipped}};
}

}  // namespace

std::vector<WeightedPoint> element_quadrature(const Mesh& mesh, int elem, int order,
                                              const std::optional<Vec2>& singular_vertex, int levels) {
  const auto& e = mesh.element(elem);
  const AffineMap map = mesh.element_map(elem);
  const QuadratureRule rule = quadrature(e.kind, order);
  std::vector<WeightedPoint> out;

  int corner = -1;
  if (singular_vertex) {
    for (int k = 0; k < static_cast<int>(e.vertex_ids.size()); ++k)
      if ((mesh.vertex(e.vertex_ids[k]) - *singular_vertex).norm() <= 1e-14 * std::max(1.0, e.h)) corner = k;
  }
  if (corner < 0) {
    append_rule(rule, map, {Vec2::Zero(), Mat2::Identity()}, out);
    return out;
  }

  // Reference frame whose origin is the singular corner.
  SubCell cell;
  if (e.kind == ElementKind::Quad) {
    const std::array<Vec2, 4> corners{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    const Vec2 o = corners[corner];
    const Vec2 next = corners[(corner + 1) % 4];
    const Vec2 prev = corners[(corner + 3) % 4];
    cell.origin = o;
    cell.jacobian.col(0) = next - o;
    cell.jacobian.col(1) = prev - o;
  } else {
    const std::array<Vec2, 3> corners{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    const Vec2 o = corners[corner];
    cell.origin = o;
    cell.jacobian.col(0) = corners[(corner + 1) % 3] - o;
    cell.jacobian.col(1) = corners[(corner + 2) % 3] - o;
  }
  for (int level = 0; level < levels; ++level) {
    auto children = split(e.kind, cell);
    for (std::size_t i = 1; i < children.size(); ++i) append_rule(rule, map, children[i], out);
    cell = children[0];
  }
  append_rule(rule, map, cell, out);
  return out;
}

std::vector<WeightedPoint> face_quadrature(const Mesh& mesh, const FaceRecord& face, int order) {
  const auto g = gauss_for_order(order);
  const Vec2 a = mesh.vertex(face.vertex_ids[0]);
  const Vec2 b = mesh.vertex(face.vertex_ids[1]);
  std::vector<WeightedPoint> out;
  out.reserve(g.size());
  for (std::size_t q = 0; q < g.size(); ++q) out.push_back({a + g.points[q] * (b - a), g.weights[q] * face.h});
  return out;
}

}  // namespace hpdg
