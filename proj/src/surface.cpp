#include "alexlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "alexlab/error.hpp"

namespace alexlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Kahan's stable Heron formula.
double triangle_area(double a, double b, double c) {
  std::array<double, 3> s{a, b, c};
  std::sort(s.begin(), s.end(), std::greater<>());
  double x = s[0], y = s[1], z = s[2];
  double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
  return 0.25 * std::sqrt(std::max(p, 0.0));
}

double angle_from_sides(double adj1, double adj2, double opp) {
  double c = (adj1 * adj1 + adj2 * adj2 - opp * opp) / (2.0 * adj1 * adj2);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

bool ConeSurface::is_singular(int v) const {
  return !boundary_[v] && std::abs(cone_angle_[v] - kTwoPi) > kRegularAngleTol;
}

int ConeSurface::find_edge(int a, int b) const {
  for (int f : vertex_faces_[a]) {
    for (int i = 0; i < 3; ++i) {
      const Edge& e = edges_[face_edges_[f][i]];
      if ((e.v0 == a && e.v1 == b) || (e.v0 == b && e.v1 == a)) return face_edges_[f][i];
    }
  }
  return -1;
}

int ConeSurface::corner_of(int f, int v) const {
  for (int i = 0; i < 3; ++i)
    if (faces_[f][i] == v) return i;
  return -1;
}

ConeSurface build_surface(const std::vector<std::array<int, 3>>& faces,
                          const std::vector<std::array<double, 3>>& face_lengths,
                          double declared_k, std::vector<Vec3> positions, int vertex_count) {
  if (faces.empty()) fail(ErrorCode::Malformed, "surface has no faces");
  if (faces.size() != face_lengths.size())
    fail(ErrorCode::Malformed, "face and length counts differ");
  int nv = vertex_count;
  if (nv < 0) {
    nv = 0;
    for (const auto& f : faces)
      for (int v : f) nv = std::max(nv, v + 1);
  }
  if (!positions.empty() && static_cast<int>(positions.size()) != nv)
    fail(ErrorCode::Malformed, "position count differs from vertex count");

  ConeSurface s;
  const int nf = static_cast<int>(faces.size());
  s.faces_ = faces;
  s.face_lengths_ = face_lengths;
  s.face_edges_.assign(nf, {-1, -1, -1});
  s.corner_angles_.resize(nf);
  s.charts_.resize(nf);
  s.face_area_.resize(nf);
  s.declared_k_ = declared_k;
  s.positions_ = std::move(positions);

  std::map<std::pair<int, int>, int> edge_index;
  std::map<std::pair<int, int>, int> directed;
  for (int f = 0; f < nf; ++f) {
    const auto& fv = faces[f];
    const auto& len = face_lengths[f];
    for (int i = 0; i < 3; ++i) {
      if (fv[i] < 0 || fv[i] >= nv)
        fail(ErrorCode::Malformed, "face " + std::to_string(f) + " has an invalid vertex id");
      if (!(std::isfinite(len[i]) && len[i] > 0))
        fail(ErrorCode::Malformed, "face " + std::to_string(f) + " has a non-positive length");
    }
    if (fv[0] == fv[1] || fv[1] == fv[2] || fv[0] == fv[2])
      fail(ErrorCode::Malformed, "face " + std::to_string(f) + " repeats a vertex");
    for (int i = 0; i < 3; ++i) {
      double a = len[i], b = len[(i + 1) % 3], c = len[(i + 2) % 3];
      if (!(a < b + c))
        fail(ErrorCode::TriangleInequality,
             "face " + std::to_string(f) + " violates the strict triangle inequality");
    }
    for (int i = 0; i < 3; ++i) {
      int a = fv[i], b = fv[(i + 1) % 3];
      if (!directed.emplace(std::make_pair(a, b), f).second)
        fail(ErrorCode::InconsistentGluing, "directed edge " + std::to_string(a) + "->" +
                                                std::to_string(b) + " appears twice");
      auto key = std::minmax(a, b);
      auto [it, fresh] = edge_index.emplace(key, static_cast<int>(s.edges_.size()));
      if (fresh) {
        Edge e;
        e.v0 = key.first;
        e.v1 = key.second;
        e.length = len[i];
        e.faces = {f, -1};
        s.edges_.push_back(e);
      } else {
        Edge& e = s.edges_[it->second];
        if (e.faces[1] >= 0)
          fail(ErrorCode::InconsistentGluing, "edge shared by more than two faces");
        double tol = 1e-9 * std::max(e.length, len[i]);
        if (std::abs(e.length - len[i]) > tol)
          fail(ErrorCode::InconsistentGluing, "edge " + std::to_string(a) + "-" +
                                                  std::to_string(b) +
                                                  " has different lengths in its two faces");
        e.faces[1] = f;
      }
      s.face_edges_[f][i] = it->second;
    }
    double l0 = len[0], l1 = len[1], l2 = len[2];
    // corner 0 between sides 2 and 0, corner 1 between 0 and 1, corner 2 between 1 and 2
    s.corner_angles_[f] = {angle_from_sides(l2, l0, l1), angle_from_sides(l0, l1, l2),
                           angle_from_sides(l1, l2, l0)};
    s.face_area_[f] = triangle_area(l0, l1, l2);
    double x = (l0 * l0 + l2 * l2 - l1 * l1) / (2.0 * l0);
    double y = 2.0 * s.face_area_[f] / l0;
    s.charts_[f] = {Vec2(0, 0), Vec2(l0, 0), Vec2(x, y)};
  }
  s.total_area_ = std::accumulate(s.face_area_.begin(), s.face_area_.end(), 0.0);

  // connectivity over shared edges
  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  for (const Edge& e : s.edges_) {
    if (e.faces[1] >= 0) parent[find_root(parent, e.faces[0])] = find_root(parent, e.faces[1]);
    else ++s.boundary_edge_count_;
  }
  for (int f = 1; f < nf; ++f)
    if (find_root(parent, f) != find_root(parent, 0))
      fail(ErrorCode::Disconnected, "face adjacency graph is disconnected");

  std::vector<std::vector<int>> incident(nv);
  for (int f = 0; f < nf; ++f)
    for (int v : faces[f]) incident[v].push_back(f);
  s.boundary_.assign(nv, 0);
  for (const Edge& e : s.edges_)
    if (e.boundary()) s.boundary_[e.v0] = s.boundary_[e.v1] = 1;

  s.vertex_faces_.resize(nv);
  s.fan_offsets_.resize(nv);
  s.cone_angle_.assign(nv, 0.0);
  s.neighbors_.resize(nv);
  for (int v = 0; v < nv; ++v) {
    if (incident[v].empty())
      fail(ErrorCode::Disconnected, "vertex " + std::to_string(v) + " has no faces");
    // In face (v, a, b) the fan sweeps from va to vb; the next face is across vb.
    auto side_from = [&](int f, int offset) {
      int c = s.corner_of(f, v);
      return s.face_edges_[f][(c + offset) % 3];
    };
    int start = incident[v].front();
    if (s.boundary_[v]) {
      start = -1;
      for (int f : incident[v])
        if (s.edges_[side_from(f, 0)].boundary()) {
          start = f;
          break;
        }
      if (start < 0) fail(ErrorCode::InconsistentGluing, "boundary fan has no start");
    }
    std::vector<int>& fan = s.vertex_faces_[v];
    int f = start;
    while (true) {
      fan.push_back(f);
      const Edge& e = s.edges_[side_from(f, 2)];
      int next = e.faces[0] == f ? e.faces[1] : e.faces[0];
      if (next < 0 || next == start) break;
      if (fan.size() > incident[v].size())
        fail(ErrorCode::InconsistentGluing, "fan at vertex " + std::to_string(v) + " is not a disk");
      f = next;
    }
    if (fan.size() != incident[v].size())
      fail(ErrorCode::InconsistentGluing,
           "vertex " + std::to_string(v) + " is not a manifold point");
    double acc = 0.0;
    for (int g : fan) {
      s.fan_offsets_[v].push_back(acc);
      acc += s.corner_angles_[g][s.corner_of(g, v)];
      for (int u : faces[g])
        if (u != v) s.neighbors_[v].push_back(u);
    }
    s.cone_angle_[v] = acc;
    auto& nb = s.neighbors_[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    if (s.is_singular(v)) s.singular_.push_back(v);
  }

  s.certified_ = std::abs(declared_k) < 1e-15;
  if (s.certified_)
    for (int v = 0; v < nv; ++v)
      if (!s.boundary_[v] && s.cone_angle_[v] > kTwoPi + kRegularAngleTol) s.certified_ = false;
  return s;
}

int nearest_vertex(const ConeSurface& s, const Vec3& p) {
  if (!s.has_positions()) fail(ErrorCode::Domain, "surface has no embedding");
  int best = 0;
  double bd = (s.position(0) - p).squaredNorm();
  for (int v = 1; v < s.vertex_count(); ++v) {
    double d = (s.position(v) - p).squaredNorm();
    if (d < bd) {
      bd = d;
      best = v;
    }
  }
  return best;
}

}  // namespace alexlab
