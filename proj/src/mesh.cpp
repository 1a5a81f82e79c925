#include "hpdg/mesh.hpp"

#include "hpdg/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hpdg {

std::string to_string(Domain domain) { return domain == Domain::LShape ? "lshape" : "unit_square"; }

Domain domain_from_string(const std::string& name) {
  if (name == "lshape" || name == "LShape") return Domain::LShape;
  if (name == "unit_square" || name == "UnitSquare" || name == "square") return Domain::UnitSquare;
  throw Error("unknown domain '" + name + "'");
}

std::string to_string(Closure closure) { return closure == Closure::RedGreen ? "red_green" : "one_irregular"; }

Closure closure_from_string(const std::string& name) {
  if (name == "red_green" || name == "RedGreen") return Closure::RedGreen;
  if (name == "one_irregular" || name == "OneIrregular" || name == "hanging") return Closure::OneIrregular;
  throw Error("unknown closure mode '" + name + "'");
}

// ---------------------------------------------------------------------------
// Construction

Mesh Mesh::build_initial(Domain domain, ElementKind kind, int n_per_side, int degree) {
  if (n_per_side < 1) throw Error("n_per_side must be at least 1");
  if (degree < 2) throw Error("polynomial degree must be at least 2");

  Mesh mesh;
  mesh.domain_ = domain;
  mesh.kind_ = kind;

  // Cells of a structured grid; the L-shape uses (-1,1)^2 with 2n cells per
  // side and drops the quadrant [0,1) x (-1,0].
  const int cells = domain == Domain::LShape ? 2 * n_per_side : n_per_side;
  const double lo = domain == Domain::LShape ? -1.0 : 0.0;
  const double step = (domain == Domain::LShape ? 2.0 : 1.0) / cells;

  std::map<std::pair<int, int>, int> grid_vertex;
  auto vertex_at = [&](int i, int j) {
    auto [it, inserted] = grid_vertex.try_emplace({i, j}, -1);
    if (inserted) it->second = mesh.add_vertex(Vec2(lo + i * step, lo + j * step));
    return it->second;
  };

  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      if (domain == Domain::LShape && i >= n_per_side && j < n_per_side) continue;
      const int v00 = vertex_at(i, j);
      const int v10 = vertex_at(i + 1, j);
      const int v11 = vertex_at(i + 1, j + 1);
      const int v01 = vertex_at(i, j + 1);
      if (kind == ElementKind::Quad) {
        mesh.add_element(kind, {v00, v10, v11, v01}, 0, std::nullopt, degree);
      } else {
        mesh.add_element(kind, {v00, v10, v11}, 0, std::nullopt, degree);
        mesh.add_element(kind, {v00, v11, v01}, 0, std::nullopt, degree);
      }
    }
  }
  mesh.rebuild_active();
  mesh.rebuild_topology();
  return mesh;
}

int Mesh::add_vertex(const Vec2& x) {
  const int id = static_cast<int>(vertices_.size());
  vertices_.push_back({id, x});
  return id;
}

std::optional<int> Mesh::find_midpoint(int a, int b) const {
  const auto it = midpoints_.find(key(a, b));
  if (it == midpoints_.end()) return std::nullopt;
  return it->second;
}

int Mesh::midpoint_vertex(int a, int b) {
  if (auto m = find_midpoint(a, b)) return *m;
  const int m = add_vertex(0.5 * (vertex(a) + vertex(b)));
  midpoints_.emplace(key(a, b), m);
  return m;
}

int Mesh::add_element(ElementKind kind, std::vector<int> vertex_ids, int level, std::optional<int> parent,
                      int degree) {
  ElementRecord e;
  e.id = static_cast<int>(elements_.size());
  e.kind = kind;
  e.vertex_ids = std::move(vertex_ids);
  e.level = level;
  e.parent = parent;
  e.degree = degree;
  double diam = 0.0;
  for (int a : e.vertex_ids)
    for (int b : e.vertex_ids) diam = std::max(diam, (vertex(a) - vertex(b)).norm());
  e.h = diam;
  elements_.push_back(std::move(e));
  const int id = elements_.back().id;
  if (!(element_area(id) > 0.0)) throw Error("degenerate element geometry (nonpositive area)");
  return id;
}

std::pair<int, int> Mesh::edge(int elem, int local) const {
  const auto& v = elements_[elem].vertex_ids;
  return {v[local], v[(local + 1) % v.size()]};
}

void Mesh::rebuild_active() {
  active_.clear();
  for (const auto& e : elements_)
    if (e.active) active_.push_back(e.id);
}

// ---------------------------------------------------------------------------
// Geometry

AffineMap Mesh::element_map(int elem) const {
  const auto& e = elements_.at(elem);
  AffineMap map;
  map.origin = vertex(e.vertex_ids[0]);
  const Vec2 c0 = vertex(e.vertex_ids[1]) - map.origin;
  const Vec2 c1 = vertex(e.kind == ElementKind::Quad ? e.vertex_ids[3] : e.vertex_ids[2]) - map.origin;
  map.jacobian.col(0) = c0;
  map.jacobian.col(1) = c1;
  map.det = map.jacobian.determinant();
  if (!(std::abs(map.det) > 0.0)) throw Error("degenerate element geometry (zero Jacobian)");
  map.inverse = map.jacobian.inverse();
  return map;
}

double Mesh::element_area(int elem) const {
  const auto& v = elements_.at(elem).vertex_ids;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = vertex(v[i]);
    const Vec2 b = vertex(v[(i + 1) % v.size()]);
    twice += a[0] * b[1] - a[1] * b[0];
  }
  return 0.5 * twice;
}

double Mesh::inradius(int elem) const {
  const auto& e = elements_.at(elem);
  const double area = element_area(elem);
  if (e.kind == ElementKind::Triangle) {
    double perimeter = 0.0;
    for (int k = 0; k < 3; ++k) {
      const auto [a, b] = edge(elem, k);
      perimeter += (vertex(a) - vertex(b)).norm();
    }
    return 2.0 * area / perimeter;
  }
  // parallelogram: half the smaller height
  double min_height = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    const auto [a, b] = edge(elem, k);
    min_height = std::min(min_height, area / (vertex(a) - vertex(b)).norm());
  }
  return 0.5 * min_height;
}

Vec2 Mesh::centroid(int elem) const {
  Vec2 c = Vec2::Zero();
  const auto& v = elements_.at(elem).vertex_ids;
  for (int id : v) c += vertex(id);
  return c / static_cast<double>(v.size());
}

double Mesh::domain_area() const { return domain_ == Domain::LShape ? 3.0 : 1.0; }

bool Mesh::on_domain_boundary(const Vec2& x, double tol) const {
  auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  if (domain_ == Domain::UnitSquare) {
    const bool inside = x[0] >= -tol && x[0] <= 1 + tol && x[1] >= -tol && x[1] <= 1 + tol;
    return inside && (near(x[0], 0) || near(x[0], 1) || near(x[1], 0) || near(x[1], 1));
  }
  const bool in_box = std::abs(x[0]) <= 1 + tol && std::abs(x[1]) <= 1 + tol;
  if (!in_box) return false;
  if (near(std::abs(x[0]), 1) || near(std::abs(x[1]), 1)) return true;
  if (near(x[1], 0) && x[0] >= -tol) return true;  // arm along the positive x-axis
  if (near(x[0], 0) && x[1] <= tol) return true;   // arm along the negative y-axis
  return false;
}

void Mesh::set_degree(int elem, int p) {
  if (p < 2) throw Error("polynomial degree must be at least 2");
  elements_.at(elem).degree = p;
}

void Mesh::set_uniform_degree(int p) {
  for (int id : active_) set_degree(id, p);
}

int Mesh::min_degree() const {
  int p = std::numeric_limits<int>::max();
  for (int id : active_) p = std::min(p, elements_[id].degree);
  return p;
}

int Mesh::max_degree() const {
  int p = 0;
  for (int id : active_) p = std::max(p, elements_[id].degree);
  return p;
}

// ---------------------------------------------------------------------------
// Edge classification

Mesh::EdgeOwners Mesh::active_edge_owners() const {
  EdgeOwners owners;
  for (int id : active_)
    for (int k = 0; k < num_edges(id); ++k) {
      const auto [a, b] = edge(id, k);
      owners[key(a, b)].emplace_back(id, k);
    }
  return owners;
}

int Mesh::edge_depth(const EdgeOwners& owners, int a, int b, int self) const {
  if (const auto it = owners.find(key(a, b)); it != owners.end())
    for (const auto& [e, k] : it->second)
      if (e != self) return 0;
  const auto m = find_midpoint(a, b);
  if (!m) return -1;
  const int d1 = edge_depth(owners, a, *m, self);
  const int d2 = edge_depth(owners, *m, b, self);
  if (d1 < 0 && d2 < 0) return -1;
  if (d1 < 0 || d2 < 0) throw std::logic_error("edge partially covered by neighbours");
  return 1 + std::max(d1, d2);
}

// ---------------------------------------------------------------------------
// Refinement

std::vector<int> Mesh::red_refine(int elem) {
  const ElementRecord parent = elements_.at(elem);
  const auto& v = parent.vertex_ids;
  std::vector<std::vector<int>> child_vertices;
  if (parent.kind == ElementKind::Quad) {
    const int m01 = midpoint_vertex(v[0], v[1]);
    const int m12 = midpoint_vertex(v[1], v[2]);
    const int m23 = midpoint_vertex(v[2], v[3]);
    const int m30 = midpoint_vertex(v[3], v[0]);
    const int c = midpoint_vertex(v[0], v[2]);
    child_vertices = {{v[0], m01, c, m30}, {m01, v[1], m12, c}, {c, m12, v[2], m23}, {m30, c, m23, v[3]}};
  } else {
    const int m01 = midpoint_vertex(v[0], v[1]);
    const int m12 = midpoint_vertex(v[1], v[2]);
    const int m20 = midpoint_vertex(v[2], v[0]);
    child_vertices = {{v[0], m01, m20}, {m01, v[1], m12}, {m20, m12, v[2]}, {m12, m20, m01}};
  }
  std::vector<int> children;
  for (auto& cv : child_vertices)
    children.push_back(add_element(parent.kind, std::move(cv), parent.level + 1, elem, parent.degree));
  elements_[elem].children = children;
  elements_[elem].active = false;
  return children;
}

void Mesh::green_split(int elem, int local_edge) {
  const ElementRecord parent = elements_.at(elem);
  const auto [a, b] = edge(elem, local_edge);
  const int c = parent.vertex_ids[(local_edge + 2) % 3];
  const int m = midpoint_vertex(a, b);
  const int c0 = add_element(parent.kind, {a, m, c}, parent.level + 1, elem, parent.degree);
  const int c1 = add_element(parent.kind, {m, b, c}, parent.level + 1, elem, parent.degree);
  elements_[c0].green = elements_[c1].green = true;
  elements_[elem].children = {c0, c1};
  elements_[elem].active = false;
}

void Mesh::remove_green() {
  bool changed = false;
  for (auto& e : elements_) {
    if (!e.active || !e.green) continue;
    auto& parent = elements_[*e.parent];
    if (parent.active) {
      parent.degree = std::max(parent.degree, e.degree);
    } else {
      parent.degree = e.degree;
    }
    parent.children.clear();
    parent.active = true;
    e.active = false;
    changed = true;
  }
  if (changed) rebuild_active();
}

void Mesh::close(Closure closure, MeshChanges& changes) {
  while (true) {
    const auto owners = active_edge_owners();
    std::vector<int> todo;
    for (int id : active_) {
      int hanging = 0;
      bool overrefined = false;
      for (int k = 0; k < num_edges(id); ++k) {
        const auto [a, b] = edge(id, k);
        const int d = edge_depth(owners, a, b, id);
        if (d >= 2) overrefined = true;
        if (d == 1) ++hanging;
      }
      if (overrefined || (closure == Closure::RedGreen && hanging >= 2)) todo.push_back(id);
    }
    if (todo.empty()) break;
    for (int id : todo) {
      changes.refined[id] = red_refine(id);
      changes.closure_refined.insert(id);
    }
    rebuild_active();
  }

  if (closure == Closure::RedGreen) {
    const auto owners = active_edge_owners();
    std::vector<std::pair<int, int>> greens;
    for (int id : active_) {
      int hanging_edge = -1, hanging = 0;
      for (int k = 0; k < 3; ++k) {
        const auto [a, b] = edge(id, k);
        if (edge_depth(owners, a, b, id) == 1) {
          ++hanging;
          hanging_edge = k;
        }
      }
      if (hanging == 1) greens.emplace_back(id, hanging_edge);
    }
    for (const auto& [id, k] : greens) green_split(id, k);
    rebuild_active();
  }
}

MeshChanges Mesh::refine(const std::set<int>& marked, Closure closure) {
  if (closure == Closure::RedGreen && kind_ != ElementKind::Triangle)
    throw Error("red-green closure requires a triangular mesh");
  for (int id : marked)
    if (id < 0 || id >= static_cast<int>(elements_.size()) || !elements_[id].active)
      throw Error("refine: element " + std::to_string(id) + " is not active");
  closure_ = closure;

  MeshChanges changes;
  std::set<int> targets;
  for (int id : marked) targets.insert(elements_[id].green ? *elements_[id].parent : id);
  if (closure == Closure::RedGreen) remove_green();

  for (int id : targets) changes.refined[id] = red_refine(id);
  rebuild_active();
  close(closure, changes);
  rebuild_topology();
  return changes;
}

MeshChanges Mesh::coarsen(const std::set<int>& marked) {
  MeshChanges changes;
  const bool red_green = closure_ == Closure::RedGreen;
  if (red_green) remove_green();

  std::set<int> parents;
  for (int id : marked) {
    if (id < 0 || id >= static_cast<int>(elements_.size())) continue;
    const auto& e = elements_[id];
    if (e.active && !e.green && e.parent) parents.insert(*e.parent);
  }

  for (int pid : parents) {
    const auto children = elements_[pid].children;
    if (children.size() != 4) continue;
    const bool all = std::all_of(children.begin(), children.end(),
                                 [&](int c) { return elements_[c].active && marked.count(c) > 0; });
    if (!all) continue;
    // A neighbour finer than a child would end up two levels finer than the parent.
    const auto owners = active_edge_owners();
    bool feasible = true;
    for (int c : children)
      for (int k = 0; k < num_edges(c) && feasible; ++k) {
        const auto [a, b] = edge(c, k);
        if (edge_depth(owners, a, b, c) >= 1) feasible = false;
      }
    if (!feasible) continue;

    int degree = 0;
    for (int c : children) {
      degree = std::max(degree, elements_[c].degree);
      elements_[c].active = false;
    }
    auto& parent = elements_[pid];
    parent.active = true;
    parent.degree = degree;
    parent.children.clear();
    changes.coarsened[pid] = children;
    rebuild_active();
  }

  rebuild_active();
  if (red_green) close(Closure::RedGreen, changes);
  rebuild_topology();
  smooth_degrees();
  return changes;
}

std::set<int> Mesh::smooth_degrees() {
  std::set<int> changed;
  bool again = true;
  while (again) {
    again = false;
    for (const auto& f : faces_) {
      if (!f.minus_elem) continue;
      auto& a = elements_[f.plus_elem];
      auto& b = elements_[*f.minus_elem];
      if (a.degree > b.degree + 1) {
        b.degree = a.degree - 1;
        changed.insert(b.id);
        again = true;
      } else if (b.degree > a.degree + 1) {
        a.degree = b.degree - 1;
        changed.insert(a.id);
        again = true;
      }
    }
  }
  return changed;
}

// ---------------------------------------------------------------------------
// Faces

void Mesh::rebuild_topology() {
  faces_.clear();
  mortars_.clear();
  element_faces_.assign(elements_.size(), {});
  const auto owners = active_edge_owners();
  std::vector<std::array<bool, 4>> covered(elements_.size(), {false, false, false, false});

  auto add_face = [&](int plus, int plus_edge, std::optional<int> minus, int minus_edge, int a, int b,
                      std::optional<int> mortar) {
    FaceRecord f;
    f.id = static_cast<int>(faces_.size());
    f.vertex_ids = {a, b};
    f.kind = minus ? FaceKind::Interior : FaceKind::Boundary;
    f.plus_elem = plus;
    f.minus_elem = minus;
    f.plus_edge = plus_edge;
    f.minus_edge = minus ? minus_edge : -1;
    const Vec2 d = vertex(b) - vertex(a);
    f.h = d.norm();
    f.normal = Vec2(d[1], -d[0]) / f.h;
    f.tangent = Vec2(-f.normal[1], f.normal[0]);
    f.mortar = mortar;
    faces_.push_back(f);
    element_faces_[plus].push_back(f.id);
    if (minus) element_faces_[*minus].push_back(f.id);
    return f.id;
  };

  auto other_owner = [&](int a, int b, int self) -> std::optional<std::pair<int, int>> {
    const auto it = owners.find(key(a, b));
    if (it == owners.end()) return std::nullopt;
    for (const auto& o : it->second)
      if (o.first != self) return o;
    return std::nullopt;
  };

  for (int e : active_) {
    for (int k = 0; k < num_edges(e); ++k) {
      if (covered[e][k]) continue;
      const auto [a, b] = edge(e, k);
      if (const auto nb = other_owner(a, b, e)) {
        const auto [f, kf] = *nb;
        // e < f here because elements are visited in increasing id order
        add_face(e, k, f, kf, a, b, std::nullopt);
        covered[e][k] = covered[f][kf] = true;
        continue;
      }
      const int depth = edge_depth(owners, a, b, e);
      if (depth < 1) continue;
      if (depth >= 2) throw std::logic_error("edge carries more than one hanging node");
      const int m = *find_midpoint(a, b);
      Mortar mortar;
      mortar.coarse_elem = e;
      mortar.coarse_edge = k;
      mortar.hanging_vertex = m;
      const int mortar_index = static_cast<int>(mortars_.size());
      const std::array<std::pair<int, int>, 2> halves{{{a, m}, {m, b}}};
      for (int s = 0; s < 2; ++s) {
        const auto [sa, sb] = halves[s];
        const auto [g, kg] = *other_owner(sa, sb, e);
        covered[g][kg] = true;
        if (g < e)
          mortar.sub_faces[s] = add_face(g, kg, e, k, sb, sa, mortar_index);
        else
          mortar.sub_faces[s] = add_face(e, k, g, kg, sa, sb, mortar_index);
      }
      covered[e][k] = true;
      mortars_.push_back(mortar);
    }
  }
  for (int e : active_)
    for (int k = 0; k < num_edges(e); ++k) {
      if (covered[e][k]) continue;
      const auto [a, b] = edge(e, k);
      add_face(e, k, std::nullopt, -1, a, b, std::nullopt);
    }
}

TraceMap Mesh::face_trace_map(const FaceRecord& face, Side side) const {
  if (side == Side::Minus && !face.minus_elem) throw Error("boundary face has no minus side");
  const int elem = side == Side::Plus ? face.plus_elem : *face.minus_elem;
  const AffineMap map = element_map(elem);
  TraceMap trace;
  trace.origin = map.to_reference(vertex(face.vertex_ids[0]));
  trace.direction = map.to_reference(vertex(face.vertex_ids[1])) - trace.origin;
  return trace;
}

void Mesh::flip_face_orientation(int face_id) {
  auto& f = faces_.at(face_id);
  if (!f.minus_elem) throw Error("cannot swap the sides of a boundary face");
  std::swap(f.plus_elem, *f.minus_elem);
  std::swap(f.plus_edge, f.minus_edge);
  std::swap(f.vertex_ids[0], f.vertex_ids[1]);
  f.normal = -f.normal;
  f.tangent = -f.tangent;
}

void Mesh::flip_face_tangent(int face_id) { faces_.at(face_id).tangent *= -1.0; }

// ---------------------------------------------------------------------------
// Diagnostics

std::vector<std::string> Mesh::check_invariants() const {
  std::vector<std::string> issues;
  auto fail = [&](const std::string& what) { issues.push_back(what); };

  double area = 0.0;
  for (int id : active_) {
    const auto& e = elements_[id];
    const double a = element_area(id);
    area += a;
    if (!(a > 0)) fail("element " + std::to_string(id) + " has nonpositive area");
    if (e.degree < 2) fail("element " + std::to_string(id) + " has degree below 2");
    if (e.h / inradius(id) > 10.0 + 1e-12) fail("element " + std::to_string(id) + " violates shape regularity");
    if (!e.children.empty()) fail("active element " + std::to_string(id) + " has children");
  }
  if (std::abs(area - domain_area()) > 1e-10 * domain_area()) fail("active elements do not tile the domain");

  for (const auto& e : elements_) {
    if (e.active || e.children.empty()) continue;
    double child_area = 0.0;
    for (int c : e.children) child_area += element_area(c);
    if (std::abs(child_area - element_area(e.id)) > 1e-12 * element_area(e.id))
      fail("children of element " + std::to_string(e.id) + " do not tile it");
  }

  double boundary_length = 0.0;
  for (const auto& f : faces_) {
    const std::string tag = "face " + std::to_string(f.id);
    if (std::abs(f.normal.norm() - 1) > 1e-12 || std::abs(f.tangent.norm() - 1) > 1e-12)
      fail(tag + ": normal/tangent not unit");
    if (std::abs(f.normal.dot(f.tangent)) > 1e-12) fail(tag + ": normal not orthogonal to tangent");
    const Vec2 mid = 0.5 * (vertex(f.vertex_ids[0]) + vertex(f.vertex_ids[1]));
    if (f.normal.dot(mid - centroid(f.plus_elem)) <= 0) fail(tag + ": normal does not point out of plus");
    for (Side side : {Side::Plus, Side::Minus}) {
      if (side == Side::Minus && !f.minus_elem) continue;
      const int elem = side == Side::Plus ? f.plus_elem : *f.minus_elem;
      const auto trace = face_trace_map(f, side);
      const auto& kind = elements_[elem].kind;
      for (double s : {0.0, 1.0})
        if (!inside_reference(kind, trace(s), 1e-10)) fail(tag + ": trace leaves the reference element");
    }
    if (f.minus_elem) {
      const auto& a = elements_[f.plus_elem];
      const auto& b = elements_[*f.minus_elem];
      if (std::abs(a.degree - b.degree) > 1) fail(tag + ": degree jump exceeds one");
      if (std::max(a.h, b.h) > 4.0 * std::min(a.h, b.h)) fail(tag + ": neighbours violate quasi-uniformity");
    } else {
      boundary_length += f.h;
      if (!on_domain_boundary(mid, 1e-12)) fail(tag + ": boundary face not on the domain boundary");
    }
  }
  const double perimeter = domain_ == Domain::LShape ? 8.0 : 4.0;
  if (std::abs(boundary_length - perimeter) > 1e-10) fail("boundary faces do not cover the boundary");

  const auto owners = active_edge_owners();
  for (int id : active_)
    for (int k = 0; k < num_edges(id); ++k) {
      const auto [a, b] = edge(id, k);
      if (edge_depth(owners, a, b, id) >= 2)
        fail("element " + std::to_string(id) + " edge " + std::to_string(k) + " has more than one hanging node");
    }
  return issues;
}

std::string Mesh::dump() const {
  std::ostringstream out;
  char buf[128];
  for (const auto& v : vertices_) {
    std::snprintf(buf, sizeof buf, "v %d %.17g %.17g\n", v.id, v.coords[0], v.coords[1]);
    out << buf;
  }
  for (int id : active_) {
    const auto& e = elements_[id];
    out << "e " << id << ' ' << to_string(e.kind) << ' ' << e.degree;
    for (int v : e.vertex_ids) out << ' ' << v;
    out << '\n';
  }
  for (const auto& f : faces_) {
    out << "f " << f.id << ' ' << (f.kind == FaceKind::Interior ? "interior" : "boundary") << ' ' << f.plus_elem << ' ';
    if (f.minus_elem)
      out << *f.minus_elem;
    else
      out << '-';
    out << '\n';
  }
  return out.str();
}

}  // namespace hpdg
