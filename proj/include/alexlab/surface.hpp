#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace alexlab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Undirected mesh edge, v0 < v1.
struct Edge {
  int v0 = -1;
  int v1 = -1;
  double length = 0.0;
  std::array<int, 2> faces{-1, -1};
  bool boundary() const { return faces[1] < 0; }
};

/// Polyhedral surface glued from Euclidean triangles.
///
/// Corner i of face f sits at vertex faces[f][i]; face_lengths[f][i] is the
/// length of the side from corner i to corner (i+1)%3 and face_edges[f][i]
/// is that side's edge id.
class ConeSurface {
 public:
  int vertex_count() const { return static_cast<int>(cone_angle_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::array<int, 3>& face(int f) const { return faces_[f]; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const std::array<double, 3>& face_lengths(int f) const { return face_lengths_[f]; }
  const std::array<int, 3>& face_edges(int f) const { return face_edges_[f]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Interior angle of face f at corner i.
  double corner_angle(int f, int i) const { return corner_angles_[f][i]; }
  double face_area(int f) const { return face_area_[f]; }
  double total_area() const { return total_area_; }

  /// Face chart: corner 0 at the origin, corner 1 on the positive x axis.
  const std::array<Vec2, 3>& chart(int f) const { return charts_[f]; }

  double cone_angle(int v) const { return cone_angle_[v]; }
  bool is_boundary(int v) const { return boundary_[v]; }
  bool has_boundary() const { return boundary_edge_count_ > 0; }
  /// Interior vertices whose cone angle differs from 2 pi.
  const std::vector<int>& singular_vertices() const { return singular_; }
  bool is_singular(int v) const;

  /// Incident faces of v in fan order (boundary fans start at a boundary edge).
  const std::vector<int>& vertex_faces(int v) const { return vertex_faces_[v]; }
  /// Cumulative corner angle at v before vertex_faces(v)[j] in the fan.
  const std::vector<double>& fan_offsets(int v) const { return fan_offsets_[v]; }
  /// Neighbouring vertices (sorted).
  const std::vector<int>& neighbors(int v) const { return neighbors_[v]; }
  /// Edge id joining a and b, or -1.
  int find_edge(int a, int b) const;
  /// Corner index of vertex v in face f, or -1.
  int corner_of(int f, int v) const;

  double declared_k() const { return declared_k_; }
  /// True iff the declared bound is k = 0 and every interior cone angle is <= 2 pi.
  bool certified() const { return certified_; }
  int euler_characteristic() const { return vertex_count() - edge_count() + face_count(); }

  bool has_positions() const { return !positions_.empty(); }
  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(int v) const { return positions_[v]; }

  /// Identity token used to check that functions and operators share a host.
  const void* id() const { return this; }

 private:
  friend ConeSurface build_surface(const std::vector<std::array<int, 3>>&,
                                   const std::vector<std::array<double, 3>>&, double,
                                   std::vector<Vec3>, int);

  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<double, 3>> face_lengths_;
  std::vector<std::array<int, 3>> face_edges_;
  std::vector<Edge> edges_;
  std::vector<std::array<double, 3>> corner_angles_;
  std::vector<std::array<Vec2, 3>> charts_;
  std::vector<double> face_area_;
  double total_area_ = 0.0;
  std::vector<double> cone_angle_;
  std::vector<char> boundary_;
  std::vector<int> singular_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<std::vector<double>> fan_offsets_;
  std::vector<std::vector<int>> neighbors_;
  int boundary_edge_count_ = 0;
  double declared_k_ = 0.0;
  bool certified_ = false;
  std::vector<Vec3> positions_;
};

/// Tolerance on |angle - 2 pi| below which an interior vertex is regular.
constexpr double kRegularAngleTol = 1e-9;

/// Validates and assembles a surface. `face_lengths[f][i]` is the side from
/// corner i to corner (i+1)%3. `vertex_count` < 0 infers it from the faces.
ConeSurface build_surface(const std::vector<std::array<int, 3>>& faces,
                          const std::vector<std::array<double, 3>>& face_lengths,
                          double declared_k, std::vector<Vec3> positions = {},
                          int vertex_count = -1);

/// Same, with lengths looked up per edge through `length(a, b)`.
template <class LengthFn>
ConeSurface build_surface_from(const std::vector<std::array<int, 3>>& faces, LengthFn&& length,
                               double declared_k, std::vector<Vec3> positions = {}) {
  std::vector<std::array<double, 3>> lengths(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f)
    for (int i = 0; i < 3; ++i) lengths[f][i] = length(faces[f][i], faces[f][(i + 1) % 3]);
  return build_surface(faces, lengths, declared_k, std::move(positions));
}

// Generators.
ConeSurface flat_disk(double R, double h);
ConeSurface cone_disk(double theta, double R, double h);
ConeSurface flat_torus(double L, double h);
ConeSurface icosphere(int subdivisions);

/// Vertex closest to a point of the embedding (requires positions).
int nearest_vertex(const ConeSurface& s, const Vec3& p);

// OFF text format with optional "#lengths" trailer.
ConeSurface read_off(const std::string& path, double declared_k = 0.0);
ConeSurface parse_off(const std::string& text, double declared_k = 0.0);
std::string format_off(const ConeSurface& s);
void write_off(const ConeSurface& s, const std::string& path);

}  // namespace alexlab
