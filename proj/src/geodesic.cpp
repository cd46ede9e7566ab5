#include "alexlab/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <Eigen/Geometry>

#include "alexlab/error.hpp"
#include "alexlab/model.hpp"

namespace alexlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Link {
  int a, b;
  double w;
  int face;
};

}  // namespace

SteinerGraph::SteinerGraph(const ConeSurface& surface, double spacing)
    : surface_(&surface), spacing_(spacing) {
  if (!(spacing > 0)) fail(ErrorCode::Domain, "Steiner spacing must be positive");
  const int nv = surface.vertex_count();
  const int ne = surface.edge_count();
  steiner_begin_.resize(ne);
  steiner_count_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    double len = surface.edge(e).length;
    int m = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
    steiner_begin_[e] = nv + static_cast<int>(node_edge_.size());
    steiner_count_[e] = m;
    for (int k = 1; k <= m; ++k) {
      node_edge_.push_back(e);
      node_param_.push_back(static_cast<double>(k) / (m + 1));
    }
    max_gap_ = std::max(max_gap_, len / (m + 1));
  }

  std::vector<Link> links;
  for (int e = 0; e < ne; ++e) {
    const Edge& E = surface.edge(e);
    int prev = E.v0;
    double step = E.length / (steiner_count_[e] + 1);
    for (int k = 0; k < steiner_count_[e]; ++k) {
      int node = steiner_begin_[e] + k;
      links.push_back({prev, node, step, E.faces[0]});
      prev = node;
    }
    links.push_back({prev, E.v1, step, E.faces[0]});
  }

  std::vector<int> nodes;
  std::vector<int> side_mask;
  for (int f = 0; f < surface.face_count(); ++f) {
    nodes.clear();
    side_mask.clear();
    const auto& fv = surface.face(f);
    for (int i = 0; i < 3; ++i) {
      nodes.push_back(fv[i]);
      side_mask.push_back((1 << i) | (1 << ((i + 2) % 3)));
    }
    for (int i = 0; i < 3; ++i) {
      int e = surface.face_edges(f)[i];
      for (int k = 0; k < steiner_count_[e]; ++k) {
        nodes.push_back(steiner_begin_[e] + k);
        side_mask.push_back(1 << i);
      }
    }
    std::vector<Vec2> pts(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) pts[i] = chart_point(f, nodes[i]);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j)
        if ((side_mask[i] & side_mask[j]) == 0)
          links.push_back({nodes[i], nodes[j], (pts[i] - pts[j]).norm(), f});
  }

  const int nn = node_count();
  offsets_.assign(nn + 1, 0);
  for (const Link& l : links) {
    ++offsets_[l.a + 1];
    ++offsets_[l.b + 1];
  }
  for (int i = 0; i < nn; ++i) offsets_[i + 1] += offsets_[i];
  targets_.resize(offsets_[nn]);
  weights_.resize(offsets_[nn]);
  arc_faces_.resize(offsets_[nn]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Link& l : links) {
    int ia = fill[l.a]++, ib = fill[l.b]++;
    targets_[ia] = l.b;
    weights_[ia] = l.w;
    arc_faces_[ia] = l.face;
    targets_[ib] = l.a;
    weights_[ib] = l.w;
    arc_faces_[ib] = l.face;
  }
  // deterministic neighbour order
  std::vector<int> perm;
  for (int u = 0; u < nn; ++u) {
    int b = offsets_[u], e = offsets_[u + 1];
    perm.resize(e - b);
    for (int i = 0; i < e - b; ++i) perm[i] = b + i;
    std::sort(perm.begin(), perm.end(), [&](int x, int y) { return targets_[x] < targets_[y]; });
    std::vector<int> t(e - b), fc(e - b);
    std::vector<double> w(e - b);
    for (int i = 0; i < e - b; ++i) {
      t[i] = targets_[perm[i]];
      w[i] = weights_[perm[i]];
      fc[i] = arc_faces_[perm[i]];
    }
    std::copy(t.begin(), t.end(), targets_.begin() + b);
    std::copy(w.begin(), w.end(), weights_.begin() + b);
    std::copy(fc.begin(), fc.end(), arc_faces_.begin() + b);
  }
}

void SteinerGraph::node_faces(int node, std::vector<int>& out) const {
  out.clear();
  if (is_vertex(node)) {
    out = surface_->vertex_faces(node);
    return;
  }
  const Edge& e = surface_->edge(node_edge(node));
  out.push_back(e.faces[0]);
  if (e.faces[1] >= 0) out.push_back(e.faces[1]);
}

bool SteinerGraph::node_in_face(int node, int face) const {
  if (is_vertex(node)) return surface_->corner_of(face, node) >= 0;
  const auto& fe = surface_->face_edges(face);
  int e = node_edge(node);
  return fe[0] == e || fe[1] == e || fe[2] == e;
}

std::array<double, 3> SteinerGraph::barycentric(int face, int node) const {
  std::array<double, 3> w{0, 0, 0};
  if (is_vertex(node)) {
    w[surface_->corner_of(face, node)] = 1.0;
    return w;
  }
  const Edge& e = surface_->edge(node_edge(node));
  double t = node_param(node);
  w[surface_->corner_of(face, e.v0)] = 1.0 - t;
  w[surface_->corner_of(face, e.v1)] = t;
  return w;
}

Vec2 SteinerGraph::chart_point(int face, int node) const {
  auto w = barycentric(face, node);
  const auto& c = surface_->chart(face);
  return w[0] * c[0] + w[1] * c[1] + w[2] * c[2];
}

std::vector<double> SteinerGraph::interpolate(const std::vector<double>& vertex_values) const {
  const int nv = surface_->vertex_count();
  std::vector<double> out(node_count());
  std::copy(vertex_values.begin(), vertex_values.begin() + nv, out.begin());
  for (int node = nv; node < node_count(); ++node) {
    const Edge& e = surface_->edge(node_edge(node));
    double t = node_param(node);
    out[node] = (1.0 - t) * vertex_values[e.v0] + t * vertex_values[e.v1];
  }
  return out;
}

std::vector<double> DistanceField::vertex_values() const {
  int nv = graph->surface().vertex_count();
  return std::vector<double>(dist.begin(), dist.begin() + nv);
}

DistanceField distance_field(std::shared_ptr<const SteinerGraph> graph, int source, double radius) {
  const SteinerGraph& g = *graph;
  if (source < 0 || source >= g.surface().vertex_count())
    fail(ErrorCode::Domain, "distance_field: invalid source vertex");
  DistanceField out;
  out.source = source;
  out.h = g.spacing();
  out.error_bound = g.max_gap();
  out.dist.assign(g.node_count(), kInf);
  out.pred.assign(g.node_count(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<char> done(g.node_count(), 0);
  out.dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    if (radius >= 0 && d > radius) break;
    done[u] = 1;
    for (int a = g.arc_begin(u); a < g.arc_end(u); ++a) {
      int v = g.arc_target(a);
      if (done[v]) continue;
      double nd = d + g.arc_length(a);
      if (nd < out.dist[v]) {
        out.dist[v] = nd;
        out.pred[v] = u;
        heap.push({nd, v});
      } else if (nd == out.dist[v] && u < out.pred[v]) {
        out.pred[v] = u;
      }
    }
  }
  if (radius >= 0)
    for (int v = 0; v < g.node_count(); ++v)
      if (!done[v]) {
        out.dist[v] = kInf;
        out.pred[v] = -1;
      }
  out.graph = std::move(graph);
  return out;
}

DistanceField distance_field(const ConeSurface& space, int source, double h) {
  return distance_field(std::make_shared<SteinerGraph>(space, h), source);
}

DijkstraWorkspace::DijkstraWorkspace(const SteinerGraph& graph)
    : graph_(&graph), dist_(graph.node_count(), kInf) {}

const std::vector<int>& DijkstraWorkspace::run(int source, double radius) {
  for (int v : touched_) dist_[v] = kInf;
  touched_.clear();
  settled_.clear();
  heap_.clear();
  auto cmp = std::greater<>();
  dist_[source] = 0.0;
  touched_.push_back(source);
  heap_.push_back({0.0, source});
  const SteinerGraph& g = *graph_;
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), cmp);
    auto [d, u] = heap_.back();
    heap_.pop_back();
    if (d > dist_[u]) continue;
    if (d > radius) break;
    settled_.push_back(u);
    for (int a = g.arc_begin(u); a < g.arc_end(u); ++a) {
      int v = g.arc_target(a);
      double nd = d + g.arc_length(a);
      if (nd < dist_[v]) {
        if (dist_[v] == kInf) touched_.push_back(v);
        dist_[v] = nd;
        heap_.push_back({nd, v});
        std::push_heap(heap_.begin(), heap_.end(), cmp);
      }
    }
  }
  return settled_;
}

void DijkstraWorkspace::search(int source, const std::function<bool(int, double)>& visit) {
  for (int v : touched_) dist_[v] = kInf;
  touched_.clear();
  settled_.clear();
  heap_.clear();
  auto cmp = std::greater<>();
  dist_[source] = 0.0;
  touched_.push_back(source);
  heap_.push_back({0.0, source});
  const SteinerGraph& g = *graph_;
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), cmp);
    auto [d, u] = heap_.back();
    heap_.pop_back();
    if (d > dist_[u]) continue;
    if (!visit(u, d)) break;
    for (int a = g.arc_begin(u); a < g.arc_end(u); ++a) {
      int v = g.arc_target(a);
      double nd = d + g.arc_length(a);
      if (nd < dist_[v]) {
        if (dist_[v] == kInf) touched_.push_back(v);
        dist_[v] = nd;
        heap_.push_back({nd, v});
        std::push_heap(heap_.begin(), heap_.end(), cmp);
      }
    }
  }
}

std::vector<double> boundary_distance(const SteinerGraph& g) {
  const ConeSurface& s = g.surface();
  std::vector<double> dist(g.node_count(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int v = 0; v < s.vertex_count(); ++v)
    if (s.is_boundary(v)) {
      dist[v] = 0.0;
      heap.push({0.0, v});
    }
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (int a = g.arc_begin(u); a < g.arc_end(u); ++a) {
      int v = g.arc_target(a);
      double nd = d + g.arc_length(a);
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  return dist;
}

Polyline trace_shortest_path(const DistanceField& field, int target_node) {
  if (target_node < 0 || target_node >= static_cast<int>(field.dist.size()))
    fail(ErrorCode::Domain, "trace_shortest_path: invalid target");
  if (!std::isfinite(field.dist[target_node]))
    fail(ErrorCode::Unreachable, "trace_shortest_path: target not reachable");
  Polyline out;
  for (int v = target_node; v >= 0; v = field.pred[v]) out.nodes.push_back(v);
  std::reverse(out.nodes.begin(), out.nodes.end());
  // Same summation order as the search, so the total matches dist exactly.
  for (int v : out.nodes) out.arclength.push_back(field.dist[v]);
  return out;
}

namespace {

// Third corner of a triangle developed across the segment pa-pb, on the side
// opposite to `away`.
Vec2 develop_apex(const Vec2& pa, const Vec2& pb, double la, double lb, const Vec2& away) {
  Vec2 ab = pb - pa;
  double L = ab.norm();
  Vec2 ex = ab / L, ey(-ex.y(), ex.x());
  double x = (L * L + la * la - lb * lb) / (2.0 * L);
  double y = std::sqrt(std::max(la * la - x * x, 0.0));
  double side = ey.dot(away - pa);
  return pa + x * ex + (side > 0 ? -y : y) * ey;
}

}  // namespace

double path_direction(const DistanceField& field, int target_node) {
  const SteinerGraph& g = *field.graph;
  const ConeSurface& s = g.surface();
  const int p = field.source;
  if (target_node == p) fail(ErrorCode::Domain, "path_direction: target equals source");
  Polyline path = trace_shortest_path(field, target_node);
  const int n1 = path.nodes[1];
  int face = -1;
  for (int a = g.arc_begin(p); a < g.arc_end(p); ++a)
    if (g.arc_target(a) == n1) face = g.arc_face(a);
  const int c = s.corner_of(face, p);
  const auto& chart = s.chart(face);
  Vec2 origin = chart[c];
  Vec2 axis = (chart[(c + 1) % 3] - origin).normalized();
  Vec2 perp(-axis.y(), axis.x());
  std::array<Vec2, 3> dev;
  for (int i = 0; i < 3; ++i) {
    Vec2 q = chart[i] - origin;
    dev[i] = Vec2(q.dot(axis), q.dot(perp));
  }
  auto place = [&](int f, const std::array<Vec2, 3>& d, int node) {
    auto w = g.barycentric(f, node);
    return Vec2(w[0] * d[0] + w[1] * d[1] + w[2] * d[2]);
  };

  // Replaces (face, dev) by the neighbour across edge e, developed in place.
  auto unfold = [&](int e) {
    const Edge& E = s.edge(e);
    int other = E.faces[0] == face ? E.faces[1] : E.faces[0];
    if (other < 0) return false;
    int ca = s.corner_of(face, E.v0), cb = s.corner_of(face, E.v1);
    int cfar = 3 - ca - cb;
    int oa = s.corner_of(other, E.v0), ob = s.corner_of(other, E.v1);
    int ofar = 3 - oa - ob;
    auto side_len = [&](int f, int i, int j) {
      return (j == (i + 1) % 3) ? s.face_lengths(f)[i] : s.face_lengths(f)[j];
    };
    std::array<Vec2, 3> nd;
    nd[oa] = dev[ca];
    nd[ob] = dev[cb];
    nd[ofar] = develop_apex(dev[ca], dev[cb], side_len(other, oa, ofar),
                            side_len(other, ob, ofar), dev[cfar]);
    face = other;
    dev = nd;
    return true;
  };

  Vec2 last = place(face, dev, n1);
  std::vector<int> faces_b;
  for (std::size_t k = 1; k + 1 < path.nodes.size(); ++k) {
    int a = path.nodes[k], b = path.nodes[k + 1];
    if (!g.node_in_face(b, face)) {
      if (g.is_vertex(a)) {
        // Continue through a regular interior vertex by rotating about it.
        if (s.is_boundary(a) || s.is_singular(a)) break;
        g.node_faces(b, faces_b);
        const auto& fan = s.vertex_faces(a);
        int m = static_cast<int>(fan.size());
        int i = static_cast<int>(std::find(fan.begin(), fan.end(), face) - fan.begin());
        int best = -1, best_steps = m + 1;
        for (int fb : faces_b) {
          auto it = std::find(fan.begin(), fan.end(), fb);
          if (it == fan.end()) continue;
          int j = static_cast<int>(it - fan.begin());
          int fwd = ((j - i) % m + m) % m;
          int steps = std::min(fwd, m - fwd);
          if (steps < best_steps) {
            best_steps = steps;
            best = fwd <= m - fwd ? fwd : -(m - fwd);
          }
        }
        if (best_steps > m) break;
        for (int step = 0; step < std::abs(best); ++step) {
          int c = s.corner_of(face, a);
          int e = s.face_edges(face)[best > 0 ? (c + 2) % 3 : c];
          unfold(e);
        }
      } else {
        int e = g.node_edge(a);
        if (!unfold(e) || !g.node_in_face(b, face)) break;
      }
    }
    last = place(face, dev, b);
  }
  int f0 = -1;
  for (int a = g.arc_begin(p); a < g.arc_end(p); ++a)
    if (g.arc_target(a) == n1) f0 = g.arc_face(a);
  const auto& fan = s.vertex_faces(p);
  std::size_t j = std::find(fan.begin(), fan.end(), f0) - fan.begin();
  double theta = s.cone_angle(p);
  double angle = s.fan_offsets(p)[j] + std::atan2(last.y(), last.x());
  angle = std::fmod(angle, theta);
  if (angle < 0) angle += theta;
  return angle;
}

double initial_direction(const ConeSurface& space, int p, int q, double h) {
  if (p == q) fail(ErrorCode::Domain, "initial_direction: q equals p");
  DistanceField field = distance_field(space, p, h);
  return path_direction(field, q);
}

const DistanceField& DistanceCache::field(int source) {
  auto it = fields_.find(source);
  if (it != fields_.end()) return it->second;
  return fields_.emplace(source, distance_field(graph_, source)).first->second;
}

double DistanceCache::distance(int a, int b) {
  if (fields_.count(b) && !fields_.count(a)) return fields_.at(b).at(a);
  return field(a).at(b);
}

double toponogov_angle_sum(DistanceCache& cache, int p, int a, int b, int c, double kappa) {
  double pa = cache.distance(p, a), pb = cache.distance(p, b), pc = cache.distance(p, c);
  double ab = cache.distance(a, b), bc = cache.distance(b, c), ca = cache.distance(c, a);
  return comparison_angle(kappa, ab, pa, pb) + comparison_angle(kappa, bc, pb, pc) +
         comparison_angle(kappa, ca, pc, pa);
}

bool toponogov_check(DistanceCache& cache, int p, int a, int b, int c, double kappa, double tol) {
  return toponogov_angle_sum(cache, p, a, b, c, kappa) <= 2.0 * std::numbers::pi + tol;
}

namespace {

struct Walker {
  const ConeSurface& s;
  int face;
  Vec2 x, d;
  int entry_side = -1;    // side we came in through
  int vertex_corner = -1; // set while sitting on a vertex
};

// Places the walker on vertex v heading at fan angle `angle`.
void place_at_vertex(Walker& w, int v, double angle) {
  const ConeSurface& s = w.s;
  const auto& fan = s.vertex_faces(v);
  const auto& off = s.fan_offsets(v);
  int j = static_cast<int>(fan.size()) - 1;
  for (int i = 0; i + 1 < static_cast<int>(fan.size()); ++i)
    if (angle < off[i + 1]) {
      j = i;
      break;
    }
  int f = fan[j], c = s.corner_of(f, v);
  const auto& ch = s.chart(f);
  Vec2 axis = (ch[(c + 1) % 3] - ch[c]).normalized();
  Vec2 perp(-axis.y(), axis.x());
  double beta = std::clamp(angle - off[j], 0.0, s.corner_angle(f, c));
  w.face = f;
  w.x = ch[c];
  w.d = std::cos(beta) * axis + std::sin(beta) * perp;
  w.entry_side = -1;
  w.vertex_corner = c;
}

std::array<double, 3> bary_in(const std::array<Vec2, 3>& c, const Vec2& y) {
  Vec2 e1 = c[1] - c[0], e2 = c[2] - c[0], r = y - c[0];
  double det = e1.x() * e2.y() - e1.y() * e2.x();
  double b1 = (r.x() * e2.y() - r.y() * e2.x()) / det;
  double b2 = (e1.x() * r.y() - e1.y() * r.x()) / det;
  return {1.0 - b1 - b2, b1, b2};
}

GeodesicRay walk(Walker w, double max_length) {
  const ConeSurface& s = w.s;
  GeodesicRay ray;
  const double vertex_eps = 1e-9;
  double travelled = 0.0;
  for (int guard = 0; guard < 10 * s.face_count() + 100; ++guard) {
    const auto& ch = s.chart(w.face);
    int side = -1;
    double lambda = kInf, mu = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (i == w.entry_side) continue;
      if (w.vertex_corner >= 0 && i != (w.vertex_corner + 1) % 3) continue;
      Vec2 A = ch[i], E = ch[(i + 1) % 3] - A;
      double den = w.d.x() * (-E.y()) + w.d.y() * E.x();
      if (std::abs(den) < 1e-15) continue;
      Vec2 r = A - w.x;
      double l = (r.x() * (-E.y()) + r.y() * E.x()) / den;
      double m = (w.d.x() * r.y() - w.d.y() * r.x()) / den;
      if (l > 1e-14 && m >= -vertex_eps && m <= 1 + vertex_eps && l < lambda) {
        lambda = l;
        mu = std::clamp(m, 0.0, 1.0);
        side = i;
      }
    }
    if (side < 0) {
      // degenerate: sliding along an edge or numerically lost
      ray.stopped = true;
      ray.end_face = w.face;
      ray.end_bary = bary_in(ch, w.x);
      ray.length = travelled;
      return ray;
    }
    if (travelled + lambda >= max_length) {
      ray.end_face = w.face;
      ray.end_bary = bary_in(ch, w.x + (max_length - travelled) * w.d);
      ray.length = max_length;
      return ray;
    }
    travelled += lambda;
    Vec2 hit = w.x + lambda * w.d;
    int e = s.face_edges(w.face)[side];
    const Edge& E = s.edge(e);
    int va = s.face(w.face)[side], vb = s.face(w.face)[(side + 1) % 3];
    double param = va == E.v0 ? mu : 1.0 - mu;

    if (mu <= vertex_eps || mu >= 1 - vertex_eps) {
      int v = mu <= vertex_eps ? va : vb;
      ray.crossings.push_back({e, v == E.v0 ? 0.0 : 1.0, travelled});
      int c = s.corner_of(w.face, v);
      if (s.is_boundary(v) || s.is_singular(v)) {
        ray.stopped = true;
        ray.end_face = w.face;
        ray.end_bary = {0, 0, 0};
        ray.end_bary[c] = 1.0;
        ray.length = travelled;
        return ray;
      }
      // straight continuation: the outgoing direction is pi away from the incoming one
      Vec2 axis = (ch[(c + 1) % 3] - ch[c]).normalized();
      Vec2 perp(-axis.y(), axis.x());
      Vec2 back = -w.d;
      double beta = std::atan2(back.dot(perp), back.dot(axis));
      const auto& fan = s.vertex_faces(v);
      std::size_t j = std::find(fan.begin(), fan.end(), w.face) - fan.begin();
      double theta = s.cone_angle(v);
      double out = std::fmod(s.fan_offsets(v)[j] + beta + std::numbers::pi, theta);
      if (out < 0) out += theta;
      place_at_vertex(w, v, out);
      continue;
    }

    ray.crossings.push_back({e, param, travelled});
    int other = E.faces[0] == w.face ? E.faces[1] : E.faces[0];
    if (other < 0) {
      ray.stopped = true;
      ray.end_face = w.face;
      ray.end_bary = bary_in(ch, hit);
      ray.length = travelled;
      return ray;
    }
    const auto& co = s.chart(other);
    Vec2 Pa = ch[s.corner_of(w.face, E.v0)], Pb = ch[s.corner_of(w.face, E.v1)];
    Vec2 Qa = co[s.corner_of(other, E.v0)], Qb = co[s.corner_of(other, E.v1)];
    double rot = std::atan2((Qb - Qa).y(), (Qb - Qa).x()) - std::atan2((Pb - Pa).y(), (Pb - Pa).x());
    Eigen::Rotation2Dd R(rot);
    w.x = Qa + R * (hit - Pa);
    w.d = (R * w.d).normalized();
    w.face = other;
    w.vertex_corner = -1;
    const auto& oe = s.face_edges(other);
    w.entry_side = static_cast<int>(std::find(oe.begin(), oe.end(), e) - oe.begin());
  }
  fail(ErrorCode::Domain, "shoot_geodesic: walk did not terminate");
}

}  // namespace

double GeodesicRay::end_value(const ConeSurface& s, const std::vector<double>& vertex_values) const {
  const auto& fv = s.face(end_face);
  return end_bary[0] * vertex_values[fv[0]] + end_bary[1] * vertex_values[fv[1]] +
         end_bary[2] * vertex_values[fv[2]];
}

GeodesicRay shoot_geodesic(const ConeSurface& space, int face, const std::array<double, 3>& bary,
                           Vec2 direction, double max_length) {
  if (face < 0 || face >= space.face_count()) fail(ErrorCode::Domain, "shoot_geodesic: invalid face");
  if (!(direction.norm() > 0)) fail(ErrorCode::Domain, "shoot_geodesic: zero direction");
  const auto& ch = space.chart(face);
  Walker w{space, face, bary[0] * ch[0] + bary[1] * ch[1] + bary[2] * ch[2], direction.normalized()};
  return walk(w, max_length);
}

GeodesicRay shoot_from_vertex(const ConeSurface& space, int v, double angle, double max_length) {
  if (v < 0 || v >= space.vertex_count()) fail(ErrorCode::Domain, "shoot_from_vertex: invalid vertex");
  double theta = space.cone_angle(v);
  angle = std::fmod(angle, theta);
  if (angle < 0) angle += theta;
  Walker w{space, -1, Vec2::Zero(), Vec2::Zero()};
  place_at_vertex(w, v, angle);
  return walk(w, max_length);
}

double node_value_on_edge(const SteinerGraph& graph, const std::vector<double>& node_values,
                          int edge, double param) {
  const Edge& E = graph.surface().edge(edge);
  int m = graph.steiner_count(edge);
  auto node = [&](int i) { return i == 0 ? E.v0 : i == m + 1 ? E.v1 : graph.steiner_begin(edge) + i - 1; };
  double pos = std::clamp(param, 0.0, 1.0) * (m + 1);
  int i0 = std::min(static_cast<int>(pos), m);
  double fr = pos - i0;
  return (1 - fr) * node_values[node(i0)] + fr * node_values[node(i0 + 1)];
}

namespace {

// Interval [b0, b1] of an edge lit from the unfolded source S. The frame puts
// edge.v0 at the origin and edge.v1 on the positive x axis, with the face the
// window propagates into on the y > 0 side.
struct Window {
  int edge;
  int face_to;
  double b0, b1;
  Vec2 S;
  double sigma;
};

struct Frame {
  Vec2 origin, ex, ey;
  Vec2 to(const Vec2& p) const { return Vec2((p - origin).dot(ex), (p - origin).dot(ey)); }
  Vec2 from(const Vec2& q) const { return origin + q.x() * ex + q.y() * ey; }
};

class ExactPropagation {
 public:
  ExactPropagation(const SteinerGraph& g, std::vector<double>& dist) : g_(g), s_(g.surface()), dist_(dist) {}

  void run(int source) {
    dist_[source] = 0.0;
    push_vertex(source, 0.0);
    while (!queue_.empty()) {
      auto [key, id] = queue_.top();
      queue_.pop();
      if (id < 0) {
        int v = -id - 1;
        if (key <= dist_[v]) expand_vertex(v, key);
      } else {
        process(windows_[id]);
      }
    }
    // points on an edge reached along the edge itself
    for (int e = 0; e < s_.edge_count(); ++e) {
      const Edge& E = s_.edge(e);
      int m = g_.steiner_count(e);
      for (int k = 0; k < m; ++k) {
        int node = g_.steiner_begin(e) + k;
        double t = g_.node_param(node);
        dist_[node] = std::min({dist_[node], dist_[E.v0] + t * E.length, dist_[E.v1] + (1 - t) * E.length});
      }
    }
  }

 private:
  bool is_source_vertex(int v) const {
    return s_.is_boundary(v) || s_.cone_angle(v) > 2 * std::numbers::pi + kRegularAngleTol;
  }

  void relax_vertex(int v, double d) {
    if (d < dist_[v] * (1 - 1e-14) - 1e-300) {
      dist_[v] = d;
      if (is_source_vertex(v)) push_vertex(v, d);
    }
  }

  void push_vertex(int v, double d) { queue_.push({d, -v - 1}); }

  // Frame of edge e seen from face f: the far side (y > 0) is away from f.
  Frame frame_from(int f, int e) const {
    const Edge& E = s_.edge(e);
    const auto& ch = s_.chart(f);
    Vec2 a = ch[s_.corner_of(f, E.v0)], b = ch[s_.corner_of(f, E.v1)];
    int third = 3 - s_.corner_of(f, E.v0) - s_.corner_of(f, E.v1);
    Frame fr{a, (b - a).normalized(), Vec2::Zero()};
    fr.ey = Vec2(-fr.ex.y(), fr.ex.x());
    if ((ch[third] - a).dot(fr.ey) > 0) fr.ey = -fr.ey;
    return fr;
  }

  int other_face(int e, int f) const {
    const Edge& E = s_.edge(e);
    return E.faces[0] == f ? E.faces[1] : E.faces[0];
  }

  static double lower_bound(const Window& w) {
    double x = std::clamp(w.S.x(), w.b0, w.b1);
    return w.sigma + std::hypot(w.S.x() - x, w.S.y());
  }

  // True when some vertex of face_to reaches every point of the interval no later than the window.
  bool dominated(const Window& w) const {
    if (w.face_to < 0) return false;
    const Edge& E = s_.edge(w.edge);
    Vec2 P0(w.b0, 0), P1(w.b1, 0);
    double lb = lower_bound(w);
    auto check = [&](int v, const Vec2& X) {
      double ub = dist_[v] + std::max((X - P0).norm(), (X - P1).norm());
      return lb > ub * (1 + 1e-12) + 1e-15;
    };
    if (check(E.v0, Vec2(0, 0)) || check(E.v1, Vec2(E.length, 0))) return true;
    int f = w.face_to;
    int c = 3 - s_.corner_of(f, E.v0) - s_.corner_of(f, E.v1);
    const auto& ch = s_.chart(f);
    Vec2 a = ch[s_.corner_of(f, E.v0)], b = ch[s_.corner_of(f, E.v1)];
    Vec2 ex = (b - a).normalized(), ey(-ex.y(), ex.x());
    Vec2 C = ch[c] - a;
    Vec2 Cl(C.dot(ex), std::abs(C.dot(ey)));
    return check(s_.face(f)[c], Cl);
  }

  void add_window(Window w) {
    if (!(w.b1 - w.b0 > 1e-12 * s_.edge(w.edge).length)) return;
    const Edge& E = s_.edge(w.edge);
    // node values inside the interval
    int m = g_.steiner_count(w.edge);
    for (int k = 0; k < m; ++k) {
      int node = g_.steiner_begin(w.edge) + k;
      double x = g_.node_param(node) * E.length;
      if (x >= w.b0 - 1e-12 && x <= w.b1 + 1e-12) {
        double d = w.sigma + std::hypot(w.S.x() - x, w.S.y());
        if (d < dist_[node]) dist_[node] = d;
      }
    }
    if (w.b0 <= 1e-12 * E.length) relax_vertex(E.v0, w.sigma + w.S.norm());
    if (w.b1 >= E.length * (1 - 1e-12)) relax_vertex(E.v1, w.sigma + (w.S - Vec2(E.length, 0)).norm());
    if (w.face_to < 0 || dominated(w)) return;
    windows_.push_back(w);
    queue_.push({lower_bound(w), static_cast<int>(windows_.size()) - 1});
  }

  void expand_vertex(int v, double sigma) {
    for (int f : s_.vertex_faces(v)) {
      int c = s_.corner_of(f, v);
      int e = s_.face_edges(f)[(c + 1) % 3];
      for (int j : {1, 2}) {
        int u = s_.face(f)[(c + j) % 3];
        relax_vertex(u, sigma + s_.edge(s_.find_edge(v, u)).length);
      }
      Frame fr = frame_from(f, e);
      add_window({e, other_face(e, f), 0.0, s_.edge(e).length, fr.to(s_.chart(f)[c]), sigma});
    }
  }

  void process(Window w) {
    if (dominated(w)) return;
    const int f = w.face_to;
    const Edge& E = s_.edge(w.edge);
    const auto& ch = s_.chart(f);
    int ca = s_.corner_of(f, E.v0), cb = s_.corner_of(f, E.v1), cc = 3 - ca - cb;
    // window frame inside the chart of f
    Frame fr{ch[ca], (ch[cb] - ch[ca]).normalized(), Vec2::Zero()};
    fr.ey = Vec2(-fr.ex.y(), fr.ex.x());
    if ((ch[cc] - ch[ca]).dot(fr.ey) < 0) fr.ey = -fr.ey;
    const Vec2 S = w.S;
    const Vec2 C = fr.to(ch[cc]);
    const Vec2 Schart = fr.from(S);
    if (!(S.y() < 0)) return;  // source on the edge line: nothing lit beyond

    auto cross_x = [&](const Vec2& P) { return S.x() + (P.x() - S.x()) * (-S.y()) / (P.y() - S.y()); };
    double xc = cross_x(C);
    if (xc >= w.b0 - 1e-12 && xc <= w.b1 + 1e-12) relax_vertex(s_.face(f)[cc], w.sigma + (C - S).norm());

    const Vec2 A(0, 0), B(E.length, 0);
    const int vc = s_.face(f)[cc];
    for (int side = 0; side < 2; ++side) {
      // edge from U to V
      Vec2 U = side == 0 ? A : C, V = side == 0 ? C : B;
      int vu = side == 0 ? E.v0 : vc, vv = side == 0 ? vc : E.v1;
      double XU = cross_x(U), XV = cross_x(V);
      if (std::max(XU, XV) < w.b0 || std::min(XU, XV) > w.b1) continue;
      Vec2 D = V - U;
      auto solve = [&](double b) {
        double den = -S.y() * D.x() - (b - S.x()) * D.y();
        return ((b - S.x()) * (U.y() - S.y()) + S.y() * (U.x() - S.x())) / den;
      };
      double t0 = 0, t1 = 1;
      // X(t) is monotone between XU and XV
      double ta = XU == XV ? 0.0 : solve(w.b0), tb = XU == XV ? 1.0 : solve(w.b1);
      if (XU <= XV) {
        if (w.b0 > XU) t0 = ta;
        if (w.b1 < XV) t1 = tb;
      } else {
        if (w.b1 < XU) t0 = tb;
        if (w.b0 > XV) t1 = ta;
      }
      t0 = std::clamp(t0, 0.0, 1.0);
      t1 = std::clamp(t1, 0.0, 1.0);
      if (!(t1 > t0)) continue;
      int e2 = s_.find_edge(vu, vv);
      const Edge& E2 = s_.edge(e2);
      double L2 = E2.length;
      double c0 = vu == E2.v0 ? t0 * L2 : (1 - t1) * L2;
      double c1 = vu == E2.v0 ? t1 * L2 : (1 - t0) * L2;
      Frame f2 = frame_from(f, e2);
      add_window({e2, other_face(e2, f), c0, c1, f2.to(Schart), w.sigma});
    }
  }

  const SteinerGraph& g_;
  const ConeSurface& s_;
  std::vector<double>& dist_;
  std::vector<Window> windows_;
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>, std::greater<>> queue_;
};

}  // namespace

DistanceField exact_distance_field(std::shared_ptr<const SteinerGraph> graph, int source) {
  const ConeSurface& s = graph->surface();
  if (source < 0 || source >= s.vertex_count()) fail(ErrorCode::Domain, "exact_distance_field: invalid source");
  DistanceField out;
  out.graph = graph;
  out.source = source;
  out.dist.assign(graph->node_count(), kInf);
  out.pred.assign(graph->node_count(), -1);
  out.h = graph->spacing();
  ExactPropagation(*graph, out.dist).run(source);
  return out;
}

}  // namespace alexlab
