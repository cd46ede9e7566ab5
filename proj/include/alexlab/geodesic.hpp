#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "alexlab/surface.hpp"

namespace alexlab {

/// Edge graph refined by Steiner points. Nodes 0..V-1 are the mesh vertices;
/// every further node sits on a mesh edge. Inside each face all pairs of
/// boundary nodes on different sides are joined by straight chart segments.
class SteinerGraph {
 public:
  SteinerGraph(const ConeSurface& surface, double spacing);

  const ConeSurface& surface() const { return *surface_; }
  double spacing() const { return spacing_; }
  /// Largest distance between consecutive nodes along a mesh edge.
  double max_gap() const { return max_gap_; }

  int node_count() const { return static_cast<int>(node_edge_.size()) + surface_->vertex_count(); }
  bool is_vertex(int node) const { return node < surface_->vertex_count(); }
  /// Edge carrying a Steiner node and its parameter from edge.v0.
  int node_edge(int node) const { return node_edge_[node - surface_->vertex_count()]; }
  double node_param(int node) const { return node_param_[node - surface_->vertex_count()]; }
  /// Steiner nodes of an edge, ordered from v0 to v1.
  int steiner_begin(int edge) const { return steiner_begin_[edge]; }
  int steiner_count(int edge) const { return steiner_count_[edge]; }

  /// Faces containing a node (incident faces for vertices, one or two otherwise).
  void node_faces(int node, std::vector<int>& out) const;
  bool node_in_face(int node, int face) const;
  /// Position of a node in the chart of a face that contains it.
  Vec2 chart_point(int face, int node) const;
  /// Convex weights of a node over the face corners.
  std::array<double, 3> barycentric(int face, int node) const;

  /// Linear interpolation of vertex values to all nodes.
  std::vector<double> interpolate(const std::vector<double>& vertex_values) const;

  // CSR adjacency.
  int degree(int node) const { return offsets_[node + 1] - offsets_[node]; }
  int arc_begin(int node) const { return offsets_[node]; }
  int arc_end(int node) const { return offsets_[node + 1]; }
  int arc_target(int arc) const { return targets_[arc]; }
  double arc_length(int arc) const { return weights_[arc]; }
  int arc_face(int arc) const { return arc_faces_[arc]; }

 private:
  const ConeSurface* surface_;
  double spacing_;
  double max_gap_ = 0.0;
  std::vector<int> node_edge_;
  std::vector<double> node_param_;
  std::vector<int> steiner_begin_;
  std::vector<int> steiner_count_;
  std::vector<int> offsets_;
  std::vector<int> targets_;
  std::vector<double> weights_;
  std::vector<int> arc_faces_;
};

/// Geodesic distances from a source vertex over a Steiner graph.
struct DistanceField {
  std::shared_ptr<const SteinerGraph> graph;
  int source = -1;
  std::vector<double> dist;  // per graph node
  std::vector<int> pred;     // per graph node, -1 at the source and unreachable nodes
  double h = 0.0;
  /// Heuristic bound on the overestimate: the largest along-edge node gap.
  double error_bound = 0.0;

  double at(int node) const { return dist[node]; }
  /// Distances restricted to the mesh vertices.
  std::vector<double> vertex_values() const;
};

DistanceField distance_field(std::shared_ptr<const SteinerGraph> graph, int source,
                             double radius = -1.0);
DistanceField distance_field(const ConeSurface& space, int source, double h);

/// Exact polyhedral distances from a source vertex, evaluated at the graph's
/// nodes, by propagating windows of straight geodesics face by face. Boundary
/// vertices and vertices with cone angle above 2 pi act as secondary sources.
/// The result carries no predecessors, so it cannot be traced.
DistanceField exact_distance_field(std::shared_ptr<const SteinerGraph> graph, int source);

/// Reusable buffers for many bounded searches on one graph.
class DijkstraWorkspace {
 public:
  explicit DijkstraWorkspace(const SteinerGraph& graph);
  /// Nodes with distance <= radius from `source`, in settling order.
  const std::vector<int>& run(int source, double radius);
  /// Settles nodes in distance order and calls visit(node, dist) on each; the
  /// search stops when visit returns false.
  void search(int source, const std::function<bool(int, double)>& visit);
  double dist(int node) const { return dist_[node]; }

 private:
  const SteinerGraph* graph_;
  std::vector<double> dist_;
  std::vector<int> settled_;
  std::vector<int> touched_;
  std::vector<std::pair<double, int>> heap_;
};

struct Polyline {
  std::vector<int> nodes;        // source first
  std::vector<double> arclength;  // cumulative, arclength.back() == dist(target)

  double length() const { return arclength.empty() ? 0.0 : arclength.back(); }
};

Polyline trace_shortest_path(const DistanceField& field, int target_node);

/// Angular coordinate in the direction circle at field.source of the traced
/// path towards `target_node`. The path is developed face by face until it
/// meets a vertex; the chord to the last developed node gives the angle.
double path_direction(const DistanceField& field, int target_node);
double initial_direction(const ConeSurface& space, int p, int q, double h);

/// Point where a straight geodesic crosses a mesh edge.
struct RayCrossing {
  int edge = -1;
  double param = 0.0;  // position along the edge, 0 at v0
  double s = 0.0;      // arclength from the start
};

/// Straight geodesic developed face by face. It passes through regular
/// interior vertices and stops at the boundary and at singular vertices.
struct GeodesicRay {
  std::vector<RayCrossing> crossings;
  int end_face = -1;
  std::array<double, 3> end_bary{};  // over the corners of end_face
  double length = 0.0;
  bool stopped = false;  // ended before max_length

  /// PL value of vertex data at the end point.
  double end_value(const ConeSurface& s, const std::vector<double>& vertex_values) const;
};

/// Starts at a point of `face` (barycentric) with a direction in the face chart.
GeodesicRay shoot_geodesic(const ConeSurface& space, int face, const std::array<double, 3>& bary,
                           Vec2 direction, double max_length);
/// Starts at vertex v; `angle` is a direction coordinate as in path_direction.
GeodesicRay shoot_from_vertex(const ConeSurface& space, int v, double angle, double max_length);

/// Node data interpolated linearly between the Steiner nodes of an edge.
double node_value_on_edge(const SteinerGraph& graph, const std::vector<double>& node_values,
                          int edge, double param);

/// Graph distance from every node to the nearest boundary vertex (infinite on closed surfaces).
std::vector<double> boundary_distance(const SteinerGraph& graph);

/// Lazily computed fields from many sources on one graph.
class DistanceCache {
 public:
  explicit DistanceCache(std::shared_ptr<const SteinerGraph> graph) : graph_(std::move(graph)) {}
  DistanceCache(const ConeSurface& space, double h)
      : graph_(std::make_shared<SteinerGraph>(space, h)) {}

  const DistanceField& field(int source);
  double distance(int a, int b);
  const std::shared_ptr<const SteinerGraph>& graph() const { return graph_; }
  const ConeSurface& surface() const { return graph_->surface(); }

 private:
  std::shared_ptr<const SteinerGraph> graph_;
  std::map<int, DistanceField> fields_;
};

/// Sum of the three comparison angles at p of the quadruple (p; a, b, c).
double toponogov_angle_sum(DistanceCache& cache, int p, int a, int b, int c, double kappa);
/// True iff the comparison-angle sum is at most 2 pi + tol.
bool toponogov_check(DistanceCache& cache, int p, int a, int b, int c, double kappa, double tol);

}  // namespace alexlab
