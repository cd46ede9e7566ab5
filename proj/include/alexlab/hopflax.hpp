#pragma once

#include <array>
#include <memory>
#include <vector>

#include "alexlab/calculus.hpp"
#include "alexlab/geodesic.hpp"
#include "alexlab/report.hpp"

namespace alexlab {

/// Minimiser of u(y) + d(x, y)^2 / 2t: either a graph node or a point inside a
/// face of the star of x (barycentric coordinates in face order).
struct FootPoint {
  int node = -1;
  int face = -1;
  std::array<double, 3> bary{};
  double distance = 0.0;  // d(x, F_t(x))
};

struct HopfLaxResult {
  double t = 0.0;
  std::vector<double> values;    // u_t per mesh vertex
  std::vector<FootPoint> foot;   // F_t per mesh vertex
  double prune_radius = 0.0;     // sqrt(4 t osc u)
  double max_search_radius = 0.0;  // largest radius actually explored
  int ties = 0;                  // vertices whose node minimum was attained twice

  PLFunction as_pl(const ConeSurface& space) const { return make_pl(space, values); }
};

struct HopfLaxOptions {
  /// Stop each search once no farther node can improve the minimum (exact).
  bool adaptive = true;
  /// Also minimise over the faces around x, not only over graph nodes.
  bool star_faces = true;
};

HopfLaxResult hopf_lax(std::shared_ptr<const SteinerGraph> graph, const PLFunction& u, double t,
                       const HopfLaxOptions& opts = {});
HopfLaxResult hopf_lax(DistanceCache& cache, const PLFunction& u, double t,
                       const HopfLaxOptions& opts = {});

/// Value and foot point at one vertex from a search over every reachable node.
std::pair<double, FootPoint> hopf_lax_unpruned(const SteinerGraph& graph, const PLFunction& u,
                                               int vertex, double t, bool star_faces = true);

/// u evaluated at a foot point.
double value_at(const SteinerGraph& graph, const PLFunction& u, const FootPoint& foot);

/// Monotone decrease, the bound 0 <= u_t - u_{t+s} <= (s/2) Lip^2 u_t and the
/// derivative (u_{t+s} - u_t)/s against -|grad u_t|^2/2, over consecutive grid
/// times on vertices whose foot points stay off the boundary.
ExperimentReport semigroup_audit(std::shared_ptr<const SteinerGraph> graph, const PLFunction& u,
                                 const std::vector<double>& times, double h,
                                 double derivative_tol = 0.0);

/// |x F_t(x)| against t |grad u_t(x)| (absolute, in length units) and the upper half of
/// the sandwich |grad u_t(x)| <= Lip u(F_t(x)), on the same interior vertices.
ExperimentReport footpoint_audit(const SteinerGraph& graph, const HopfLaxResult& result,
                                 const PLFunction& u, double h, double identity_tol = 0.0);

/// Vertices whose graph distance to the boundary exceeds every foot distance
/// of `result` by at least h (all vertices on closed surfaces).
std::vector<int> audit_vertices(const SteinerGraph& graph, const HopfLaxResult& result, double h);

}  // namespace alexlab
