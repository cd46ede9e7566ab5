#include "alexlab/hopflax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alexlab/error.hpp"

namespace alexlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FaceMin {
  double value = kInf;
  Vec2 point;
};

// min over the triangle (P0, P1, P2) of u0 + g.(y - P0) + |y - P0|^2 / 2t
FaceMin minimise_on_face(const std::array<Vec2, 3>& P, double u0, const Vec2& g, double t) {
  auto phi = [&](const Vec2& y) { return u0 + g.dot(y - P[0]) + (y - P[0]).squaredNorm() / (2 * t); };
  FaceMin best;
  Vec2 star = P[0] - t * g;
  // barycentric test of the unconstrained minimiser
  Vec2 e1 = P[1] - P[0], e2 = P[2] - P[0], r = star - P[0];
  double det = e1.x() * e2.y() - e1.y() * e2.x();
  double b1 = (r.x() * e2.y() - r.y() * e2.x()) / det;
  double b2 = (e1.x() * r.y() - e1.y() * r.x()) / det;
  if (b1 >= 0 && b2 >= 0 && b1 + b2 <= 1) {
    best.value = phi(star);
    best.point = star;
    return best;
  }
  const int seg[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& sg : seg) {
    Vec2 A = P[sg[0]], D = P[sg[1]] - A;
    double s = -(t * g.dot(D) + (A - P[0]).dot(D)) / D.squaredNorm();
    s = std::clamp(s, 0.0, 1.0);
    Vec2 y = A + s * D;
    double v = phi(y);
    if (v < best.value) best.value = v, best.point = y;
  }
  return best;
}

std::array<double, 3> barycentric_of(const std::array<Vec2, 3>& c, const Vec2& y) {
  Vec2 e1 = c[1] - c[0], e2 = c[2] - c[0], r = y - c[0];
  double det = e1.x() * e2.y() - e1.y() * e2.x();
  double b1 = (r.x() * e2.y() - r.y() * e2.x()) / det;
  double b2 = (e1.x() * r.y() - e1.y() * r.x()) / det;
  return {1.0 - b1 - b2, b1, b2};
}

struct VertexSolve {
  double value = kInf;
  FootPoint foot;
  bool tie = false;
  double searched = 0.0;
};

struct Context {
  const SteinerGraph* graph;
  const PLFunction* u;
  std::vector<double> node_u;
  double t;
  double inf_u, osc, lip;
};

Context make_context(const SteinerGraph& g, const PLFunction& u, double t) {
  if (!(t > 0)) fail(ErrorCode::Domain, "hopf_lax needs t > 0");
  if (u.host != &g.surface() || u.size() != g.surface().vertex_count())
    fail(ErrorCode::HostMismatch, "function is not hosted on the graph's surface");
  Context c{&g, &u, g.interpolate(u.values), t, 0, 0, 0};
  auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
  c.inf_u = *lo;
  c.osc = *hi - *lo;
  // Lipschitz constant of the node values along arcs: u(y) >= u(x) - lip d(x, y)
  for (int a = 0; a < g.node_count(); ++a)
    for (int k = g.arc_begin(a); k < g.arc_end(a); ++k) {
      double len = g.arc_length(k);
      if (len > 0) c.lip = std::max(c.lip, std::abs(c.node_u[a] - c.node_u[g.arc_target(k)]) / len);
    }
  c.lip *= 1.0 + 1e-12;
  return c;
}

VertexSolve solve_vertex(const Context& c, DijkstraWorkspace& ws, int x, bool adaptive,
                         bool star_faces) {
  const double t = c.t;
  const double ux = c.node_u[x];
  const double cap = std::sqrt(4.0 * t * c.osc);
  VertexSolve out;
  out.value = ux;
  out.foot.node = x;
  if (c.osc > 0) {
    ws.search(x, [&](int node, double d) {
      if (adaptive) {
        const double margin = 1e-12 * (1.0 + std::abs(out.value));
        const double q = d * d / (2 * t);
        if (d > cap * (1.0 + 1e-12)) return false;
        if (q > out.value - c.inf_u + margin) return false;
        if (d > t * c.lip && q - c.lip * d + (ux - out.value) > margin) return false;
      }
      out.searched = std::max(out.searched, d);
      double v = c.node_u[node] + d * d / (2 * t);
      if (v < out.value) {
        out.value = v;
        out.foot.node = node;
        out.foot.distance = d;
        out.tie = false;
      } else if (v == out.value && node != out.foot.node) {
        out.tie = true;
        if (node < out.foot.node) {
          out.foot.node = node;
          out.foot.distance = d;
        }
      }
      return true;
    });
  }
  if (star_faces && c.osc > 0) {
    const ConeSurface& s = c.graph->surface();
    const PLFunction& u = *c.u;
    for (int f : s.vertex_faces(x)) {
      int cx = s.corner_of(f, x);
      const auto& ch = s.chart(f);
      const auto& fv = s.face(f);
      std::array<Vec2, 3> P{ch[cx], ch[(cx + 1) % 3], ch[(cx + 2) % 3]};
      Vec2 g = face_gradient_of(s, f, u[fv[0]], u[fv[1]], u[fv[2]]);
      FaceMin m = minimise_on_face(P, ux, g, t);
      if (m.value < out.value) {
        out.value = m.value;
        out.tie = false;
        out.foot.node = -1;
        out.foot.face = f;
        out.foot.bary = barycentric_of(ch, m.point);
        out.foot.distance = (m.point - P[0]).norm();
      }
    }
  }
  return out;
}

}  // namespace

HopfLaxResult hopf_lax(std::shared_ptr<const SteinerGraph> graph, const PLFunction& u, double t,
                       const HopfLaxOptions& opts) {
  const SteinerGraph& g = *graph;
  Context c = make_context(g, u, t);
  HopfLaxResult res;
  res.t = t;
  res.prune_radius = std::sqrt(4.0 * t * c.osc);
  const int nv = g.surface().vertex_count();
  res.values.resize(nv);
  res.foot.resize(nv);
  DijkstraWorkspace ws(g);
  for (int x = 0; x < nv; ++x) {
    VertexSolve v = solve_vertex(c, ws, x, opts.adaptive, opts.star_faces);
    res.values[x] = v.value;
    res.foot[x] = v.foot;
    res.ties += v.tie;
    res.max_search_radius = std::max(res.max_search_radius, v.searched);
  }
  return res;
}

HopfLaxResult hopf_lax(DistanceCache& cache, const PLFunction& u, double t,
                       const HopfLaxOptions& opts) {
  return hopf_lax(cache.graph(), u, t, opts);
}

std::pair<double, FootPoint> hopf_lax_unpruned(const SteinerGraph& graph, const PLFunction& u,
                                               int vertex, double t, bool star_faces) {
  Context c = make_context(graph, u, t);
  DijkstraWorkspace ws(graph);
  VertexSolve v = solve_vertex(c, ws, vertex, false, star_faces);
  return {v.value, v.foot};
}

double value_at(const SteinerGraph& graph, const PLFunction& u, const FootPoint& foot) {
  if (foot.node >= 0) {
    if (graph.is_vertex(foot.node)) return u[foot.node];
    const Edge& e = graph.surface().edge(graph.node_edge(foot.node));
    double p = graph.node_param(foot.node);
    return (1.0 - p) * u[e.v0] + p * u[e.v1];
  }
  const auto& fv = graph.surface().face(foot.face);
  return foot.bary[0] * u[fv[0]] + foot.bary[1] * u[fv[1]] + foot.bary[2] * u[fv[2]];
}

std::vector<int> audit_vertices(const SteinerGraph& graph, const HopfLaxResult& result, double h) {
  const ConeSurface& s = graph.surface();
  std::vector<double> bd = boundary_distance(graph);
  double reach = 0.0;
  for (const FootPoint& f : result.foot) reach = std::max(reach, f.distance);
  std::vector<int> out;
  for (int v = 0; v < s.vertex_count(); ++v)
    if (bd[v] > reach + h) out.push_back(v);
  return out;
}

namespace {

// Lipschitz constant of the PL function u at a foot point.
double lip_at(const SteinerGraph& graph, const PLFunction& u, const FootPoint& foot) {
  const ConeSurface& s = graph.surface();
  auto face_norm = [&](int f) {
    const auto& fv = s.face(f);
    return face_gradient_of(s, f, u[fv[0]], u[fv[1]], u[fv[2]]).norm();
  };
  if (foot.node >= 0) {
    if (graph.is_vertex(foot.node)) return pointwise_lip(s, u, foot.node);
    const Edge& e = s.edge(graph.node_edge(foot.node));
    double m = 0.0;
    for (int f : e.faces)
      if (f >= 0) m = std::max(m, face_norm(f));
    return m;
  }
  double m = face_norm(foot.face);
  const auto& fe = s.face_edges(foot.face);
  // on a side of the face: include the neighbour across it (side i is opposite corner i + 2)
  for (int i = 0; i < 3; ++i) {
    if (foot.bary[(i + 2) % 3] > 1e-12) continue;
    const Edge& e = s.edge(fe[i]);
    for (int f : e.faces)
      if (f >= 0) m = std::max(m, face_norm(f));
  }
  return m;
}

}  // namespace

ExperimentReport semigroup_audit(std::shared_ptr<const SteinerGraph> graph, const PLFunction& u,
                                 const std::vector<double>& times, double h,
                                 double derivative_tol) {
  if (times.size() < 2) fail(ErrorCode::Domain, "semigroup_audit needs at least two times");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!(times[i] > 0) || (i > 0 && !(times[i] > times[i - 1])))
      fail(ErrorCode::Domain, "semigroup_audit needs an increasing positive time grid");
  if (derivative_tol <= 0) derivative_tol = 0.02 + 0.6 * h;
  const ConeSurface& s = graph->surface();
  std::vector<HopfLaxResult> runs;
  for (double t : times) runs.push_back(hopf_lax(graph, u, t));
  std::vector<int> verts = audit_vertices(*graph, runs.back(), h);

  ExperimentReport rep;
  rep.name = "semigroup_audit";
  rep.params = {{"times", times}, {"h", h}, {"derivative_tol", derivative_tol}};
  rep.set_budget(1e-9, 0.5, h);
  rep.meta["audit_vertices"] = verts.size();
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const HopfLaxResult &a = runs[i], &b = runs[i + 1];
    const double s_step = b.t - a.t;
    PLFunction ua = a.as_pl(s);
    GradientField grad = face_gradient(s, ua);
    double worst_fd = 0.0, fd_sum = 0.0;
    for (int v : verts) {
      rep.add_exact("monotone", b.values[v] <= a.values[v]);
      double drop = a.values[v] - b.values[v];
      double lip = pointwise_lip(s, ua, v);
      rep.add_check("lip_bound", 0.5 * s_step * lip * lip - drop, rep.tolerance);
      double fd = (b.values[v] - a.values[v]) / s_step;
      double err = std::abs(fd + 0.5 * grad.vertex_sq[v]);
      worst_fd = std::max(worst_fd, err);
      fd_sum += fd;
      rep.add_check("derivative", derivative_tol - err, derivative_tol);
    }
    pairs.push_back({{"t", a.t},
                     {"s", s_step},
                     {"max_derivative_error", worst_fd},
                     {"mean_derivative", verts.empty() ? 0.0 : fd_sum / verts.size()}});
  }
  rep.fitted["pairs"] = pairs;
  std::vector<std::pair<double, double>> plot;
  for (const auto& r : runs) {
    double m = 0.0;
    for (int v : verts) m += r.values[v];
    plot.push_back({r.t, verts.empty() ? 0.0 : m / verts.size()});
  }
  rep.add_plot("mean_value_vs_t", plot);
  rep.finalize();
  return rep;
}

ExperimentReport footpoint_audit(const SteinerGraph& graph, const HopfLaxResult& result,
                                 const PLFunction& u, double h, double identity_tol) {
  if (identity_tol <= 0) identity_tol = 0.05;
  const ConeSurface& s = graph.surface();
  PLFunction ut = result.as_pl(s);
  GradientField grad = face_gradient(s, ut);
  std::vector<int> verts = audit_vertices(graph, result, h);
  ExperimentReport rep;
  rep.name = "footpoint_audit";
  rep.params = {{"t", result.t}, {"h", h}, {"identity_tol", identity_tol}};
  rep.set_budget(0.02, 1.0, h);
  rep.meta["audit_vertices"] = verts.size();
  rep.meta["ties"] = result.ties;
  double worst_identity = 0.0, worst_sandwich = 0.0;
  for (int v : verts) {
    double lhs = result.foot[v].distance;
    double rhs = result.t * std::sqrt(grad.vertex_sq[v]);
    double gap = std::abs(lhs - rhs);
    worst_identity = std::max(worst_identity, gap);
    rep.add_check("identity", identity_tol - gap, identity_tol);
    double over = std::sqrt(grad.vertex_sq[v]) - lip_at(graph, u, result.foot[v]);
    worst_sandwich = std::max(worst_sandwich, over);
    rep.add_check("sandwich_upper", -over, rep.tolerance);
  }
  rep.fitted["max_identity_violation"] = worst_identity;
  rep.fitted["max_identity_violation_over_t"] = worst_identity / result.t;
  rep.fitted["max_sandwich_excess"] = worst_sandwich;
  rep.finalize();
  return rep;
}

}  // namespace alexlab
