#pragma once

#include "hpdg/types.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hpdg {

enum class Domain { UnitSquare, LShape };
enum class Closure { OneIrregular, RedGreen };
enum class FaceKind { Interior, Boundary };
enum class Side { Plus, Minus };

std::string to_string(Domain domain);
Domain domain_from_string(const std::string& name);
std::string to_string(Closure closure);
Closure closure_from_string(const std::string& name);

/// x = origin + jacobian * xi, from the reference element of the given kind.
struct AffineMap {
  Vec2 origin = Vec2::Zero();
  Mat2 jacobian = Mat2::Identity();
  Mat2 inverse = Mat2::Identity();
  double det = 1.0;

  Vec2 to_physical(const Vec2& ref) const { return origin + jacobian * ref; }
  Vec2 to_reference(const Vec2& x) const { return inverse * (x - origin); }
};

struct Vertex {
  int id = -1;
  Vec2 coords = Vec2::Zero();
};

struct ElementRecord {
  int id = -1;
  ElementKind kind = ElementKind::Quad;
  std::vector<int> vertex_ids;  // counterclockwise
  int level = 0;
  std::optional<int> parent;
  std::vector<int> children;
  bool active = true;
  bool green = false;  // half of a green bisection
  double h = 0.0;      // diameter
  int degree = 2;
};

struct FaceRecord {
  int id = -1;
  /// Endpoints, counterclockwise with respect to the plus element.
  std::array<int, 2> vertex_ids{-1, -1};
  FaceKind kind = FaceKind::Boundary;
  int plus_elem = -1;
  std::optional<int> minus_elem;
  int plus_edge = -1;
  int minus_edge = -1;
  Vec2 normal = Vec2::Zero();  // out of the plus element
  Vec2 tangent = Vec2::Zero();
  double h = 0.0;
  std::optional<int> mortar;  // index into Mesh::mortars() for halves of a split edge
};

/// A coarse edge carrying one hanging node, integrated as two sub-faces.
struct Mortar {
  int coarse_elem = -1;
  int coarse_edge = -1;
  int hanging_vertex = -1;
  std::array<int, 2> sub_faces{-1, -1};
};

/// Affine parametrisation s in [0,1] -> reference coordinates of one side of a face.
struct TraceMap {
  Vec2 origin = Vec2::Zero();
  Vec2 direction = Vec2::Zero();

  Vec2 operator()(double s) const { return origin + s * direction; }
  /// Parameter of a reference point lying on the traced segment.
  double inverse(const Vec2& ref) const { return (ref - origin).dot(direction) / direction.squaredNorm(); }
};

/// Bookkeeping of one mutation, used to carry per-element data across it.
struct MeshChanges {
  std::map<int, std::vector<int>> refined;    // parent -> children (marked and closure)
  std::set<int> closure_refined;              // subset of refined keys not requested by the caller
  std::map<int, std::vector<int>> coarsened;  // restored parent -> former children
};

/// Conforming or 1-irregular mesh of triangles or parallelograms.
///
/// Elements are never deleted; refinement deactivates the parent and appends
/// children, coarsening reactivates the parent. Faces are rebuilt from the
/// active elements after every mutation, so face ids are only stable between
/// mutations. Interior faces point out of the element with the smaller id.
class Mesh {
 public:
  static Mesh build_initial(Domain domain, ElementKind kind, int n_per_side, int degree);

  /// Splits every marked element into four children and restores the closure
  /// invariants. Throws hpdg::Error for RedGreen on quadrilaterals or for ids
  /// that are not active elements.
  MeshChanges refine(const std::set<int>& marked, Closure closure);

  /// Merges sibling families whose four members are all active and marked,
  /// provided the merge keeps at most one hanging node per face. Other marks
  /// are ignored.
  MeshChanges coarsen(const std::set<int>& marked);

  /// Raises the lower degree across every face until neighbours differ by at
  /// most one. Returns the elements whose degree changed.
  std::set<int> smooth_degrees();

  TraceMap face_trace_map(const FaceRecord& face, Side side) const;

  Domain domain() const { return domain_; }
  ElementKind kind() const { return kind_; }
  double domain_area() const;
  bool on_domain_boundary(const Vec2& x, double tol = 1e-12) const;

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<ElementRecord>& elements() const { return elements_; }
  const ElementRecord& element(int id) const { return elements_.at(id); }
  const std::vector<FaceRecord>& faces() const { return faces_; }
  const std::vector<Mortar>& mortars() const { return mortars_; }
  const std::vector<int>& active_elements() const { return active_; }
  int num_active() const { return static_cast<int>(active_.size()); }

  /// Faces adjacent to each active element, indexed by element id.
  const std::vector<std::vector<int>>& element_faces() const { return element_faces_; }

  Vec2 vertex(int id) const { return vertices_.at(id).coords; }
  AffineMap element_map(int elem) const;
  double element_area(int elem) const;
  double inradius(int elem) const;
  Vec2 centroid(int elem) const;

  int degree(int elem) const { return elements_.at(elem).degree; }
  void set_degree(int elem, int p);
  void set_uniform_degree(int p);
  int min_degree() const;
  int max_degree() const;

  /// Swaps plus and minus of an interior face (normal reversed).
  void flip_face_orientation(int face_id);
  /// Reverses the tangent of a face.
  void flip_face_tangent(int face_id);

  /// Violations of the mesh invariants; empty when the mesh is valid.
  std::vector<std::string> check_invariants() const;

  /// Plain-text dump, ordered by id.
  std::string dump() const;

 private:
  using EdgeKey = std::pair<int, int>;
  using EdgeOwners = std::map<EdgeKey, std::vector<std::pair<int, int>>>;

  static EdgeKey key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

  int add_vertex(const Vec2& x);
  int midpoint_vertex(int a, int b);
  std::optional<int> find_midpoint(int a, int b) const;
  int add_element(ElementKind kind, std::vector<int> vertex_ids, int level, std::optional<int> parent, int degree);
  std::pair<int, int> edge(int elem, int local) const;
  int num_edges(int elem) const { return static_cast<int>(elements_[elem].vertex_ids.size()); }

  EdgeOwners active_edge_owners() const;
  /// Hanging depth of an edge seen from `self`: 0 conforming, 1 one hanging
  /// node, >= 2 overrefined, -1 no neighbour (boundary).
  int edge_depth(const EdgeOwners& owners, int a, int b, int self) const;

  std::vector<int> red_refine(int elem);
  void green_split(int elem, int local_edge);
  void remove_green();
  void close(Closure closure, MeshChanges& changes);
  void rebuild_topology();
  void rebuild_active();

  Domain domain_ = Domain::UnitSquare;
  ElementKind kind_ = ElementKind::Quad;
  Closure closure_ = Closure::OneIrregular;  // last closure used by refine()
  std::vector<Vertex> vertices_;
  std::vector<ElementRecord> elements_;
  std::vector<FaceRecord> faces_;
  std::vector<Mortar> mortars_;
  std::vector<int> active_;
  std::vector<std::vector<int>> element_faces_;
  std::map<EdgeKey, int> midpoints_;
};

}  // namespace hpdg
