#include "alexlab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alexlab/error.hpp"

namespace alexlab {

namespace {

void check_host(const ConeSurface& space, const PLFunction& u) {
  if (u.host != &space || u.size() != space.vertex_count())
    fail(ErrorCode::HostMismatch, "function is not hosted on this surface");
}

void check_host(const DirichletOperator& op, const PLFunction& u) {
  if (u.host != op.host || u.size() != op.mass.size())
    fail(ErrorCode::HostMismatch, "function and operator have different hosts");
}

Eigen::Map<const Eigen::VectorXd> as_vector(const PLFunction& u) {
  return Eigen::Map<const Eigen::VectorXd>(u.values.data(), u.size());
}

struct ClipVertex {
  Vec2 p;
  double d;
  double u;
};

// Sutherland-Hodgman against sign * (d - level) >= 0.
void clip(std::vector<ClipVertex>& poly, double level, double sign) {
  std::vector<ClipVertex> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ClipVertex& a = poly[i];
    const ClipVertex& b = poly[(i + 1) % n];
    double fa = sign * (a.d - level), fb = sign * (b.d - level);
    if (fa >= 0) out.push_back(a);
    if ((fa >= 0) != (fb >= 0)) {
      double t = fa / (fa - fb);
      out.push_back({a.p + t * (b.p - a.p), a.d + t * (b.d - a.d), a.u + t * (b.u - a.u)});
    }
  }
  poly.swap(out);
}

// Integral of u over {lo <= d <= hi} (lo may be -inf).
double band_integral(const DistanceField& field, const PLFunction& u, double lo, double hi,
                     double* area_out) {
  const ConeSurface& s = field.graph->surface();
  check_host(s, u);
  double total = 0.0, area = 0.0;
  std::vector<ClipVertex> poly;
  for (int f = 0; f < s.face_count(); ++f) {
    const auto& fv = s.face(f);
    double dmin = std::min({field.at(fv[0]), field.at(fv[1]), field.at(fv[2])});
    double dmax = std::max({field.at(fv[0]), field.at(fv[1]), field.at(fv[2])});
    if (dmin > hi || dmax < lo) continue;
    poly.clear();
    for (int i = 0; i < 3; ++i) poly.push_back({s.chart(f)[i], field.at(fv[i]), u[fv[i]]});
    if (dmin < lo) clip(poly, lo, 1.0);
    if (dmax > hi) clip(poly, hi, -1.0);
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
      Vec2 e1 = poly[i].p - poly[0].p, e2 = poly[i + 1].p - poly[0].p;
      double a = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
      area += a;
      total += a * (poly[0].u + poly[i].u + poly[i + 1].u) / 3.0;
    }
  }
  if (area_out) *area_out = area;
  return total;
}

}  // namespace

PLFunction make_pl(const ConeSurface& space, std::vector<double> values) {
  if (static_cast<int>(values.size()) != space.vertex_count())
    fail(ErrorCode::HostMismatch, "value count differs from vertex count");
  for (double x : values)
    if (!std::isfinite(x)) fail(ErrorCode::Domain, "PL function values must be finite");
  return PLFunction{&space, std::move(values)};
}

PLFunction constant_pl(const ConeSurface& space, double c) {
  return PLFunction{&space, std::vector<double>(space.vertex_count(), c)};
}

PLFunction sample_pl(const ConeSurface& space, const std::function<double(const Vec3&)>& fn) {
  if (!space.has_positions()) fail(ErrorCode::Domain, "surface has no embedding to sample on");
  std::vector<double> vals(space.vertex_count());
  for (int v = 0; v < space.vertex_count(); ++v) vals[v] = fn(space.position(v));
  return make_pl(space, std::move(vals));
}

Vec2 face_gradient_of(const ConeSurface& space, int f, double u0, double u1, double u2) {
  const auto& c = space.chart(f);
  // c[0] = 0, c[1] = (l, 0): g.x from the first side, g.y from the second.
  double gx = (u1 - u0) / c[1].x();
  double gy = (u2 - u0 - gx * c[2].x()) / c[2].y();
  return Vec2(gx, gy);
}

GradientField face_gradient(const ConeSurface& space, const PLFunction& u) {
  check_host(space, u);
  GradientField g;
  g.face.resize(space.face_count());
  g.vertex_sq.assign(space.vertex_count(), 0.0);
  std::vector<double> weight(space.vertex_count(), 0.0);
  for (int f = 0; f < space.face_count(); ++f) {
    const auto& fv = space.face(f);
    g.face[f] = face_gradient_of(space, f, u[fv[0]], u[fv[1]], u[fv[2]]);
    double a = space.face_area(f), sq = g.face[f].squaredNorm();
    for (int v : fv) {
      g.vertex_sq[v] += a * sq;
      weight[v] += a;
    }
  }
  for (int v = 0; v < space.vertex_count(); ++v) g.vertex_sq[v] /= weight[v];
  return g;
}

double pointwise_lip(const ConeSurface& space, const PLFunction& u, int x) {
  check_host(space, u);
  double best = 0.0;
  for (int y : space.neighbors(x)) {
    double len = space.edge(space.find_edge(x, y)).length;
    best = std::max(best, std::abs(u[x] - u[y]) / len);
  }
  return best;
}

double pointwise_lip(const SteinerGraph& graph, const std::vector<double>& node_values, int node) {
  double best = 0.0;
  for (int a = graph.arc_begin(node); a < graph.arc_end(node); ++a)
    best = std::max(best, std::abs(node_values[node] - node_values[graph.arc_target(a)]) /
                              graph.arc_length(a));
  return best;
}

DirichletOperator assemble_dirichlet(const ConeSurface& space) {
  DirichletOperator op;
  op.host = &space;
  const int nv = space.vertex_count();
  op.mass = Eigen::VectorXd::Zero(nv);
  std::vector<double> weight(space.edge_count(), 0.0);
  for (int f = 0; f < space.face_count(); ++f) {
    const auto& len = space.face_lengths(f);
    double area = space.face_area(f);
    for (int i = 0; i < 3; ++i) {
      // the corner opposite side i is corner (i + 2) % 3
      double a = len[i], b = len[(i + 1) % 3], c = len[(i + 2) % 3];
      double cot = (b * b + c * c - a * a) / (4.0 * area);
      weight[space.face_edges(f)[i]] += 0.5 * cot;
    }
    for (int v : space.face(f)) op.mass[v] += area / 3.0;
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * space.edge_count());
  op.min_weight = weight.empty() ? 0.0 : weight[0];
  for (int e = 0; e < space.edge_count(); ++e) {
    const Edge& E = space.edge(e);
    double w = weight[e];
    op.min_weight = std::min(op.min_weight, w);
    trip.emplace_back(E.v0, E.v1, -w);
    trip.emplace_back(E.v1, E.v0, -w);
    trip.emplace_back(E.v0, E.v0, w);
    trip.emplace_back(E.v1, E.v1, w);
  }
  op.stiffness.resize(nv, nv);
  op.stiffness.setFromTriplets(trip.begin(), trip.end());
  op.stiffness.makeCompressed();
  op.boundary.assign(nv, 0);
  for (int v = 0; v < nv; ++v) op.boundary[v] = space.is_boundary(v);
  return op;
}

double dirichlet_form(const DirichletOperator& op, const PLFunction& u, const PLFunction& v) {
  check_host(op, u);
  check_host(op, v);
  return as_vector(u).dot(op.stiffness * as_vector(v));
}

double laplacian_functional(const DirichletOperator& op, const PLFunction& u,
                            const PLFunction& phi) {
  check_host(op, phi);
  for (int v = 0; v < phi.size(); ++v)
    if (op.boundary[v] && phi[v] != 0.0)
      fail(ErrorCode::Domain, "test function must vanish on the boundary");
  return -dirichlet_form(op, u, phi);
}

Eigen::VectorXd laplacian_on_hats(const DirichletOperator& op, const PLFunction& u) {
  check_host(op, u);
  return -(op.stiffness * as_vector(u));
}

double lumped_integral(const DirichletOperator& op, const PLFunction& f, const PLFunction& phi) {
  check_host(op, f);
  check_host(op, phi);
  return (op.mass.array() * as_vector(f).array() * as_vector(phi).array()).sum();
}

std::vector<Hat> hat_functions(const ConeSurface& space, const std::function<bool(int)>& region) {
  std::vector<Hat> hats;
  for (int v = 0; v < space.vertex_count(); ++v) {
    if (space.is_boundary(v) || !region(v)) continue;
    const auto& nb = space.neighbors(v);
    if (std::all_of(nb.begin(), nb.end(), region)) hats.push_back({v});
  }
  if (hats.empty()) fail(ErrorCode::EmptyRegion, "region has no interior vertices");
  return hats;
}

PLFunction hat_to_pl(const ConeSurface& space, const Hat& hat) {
  PLFunction phi = constant_pl(space, 0.0);
  phi.values[hat.center] = 1.0;
  return phi;
}

double shell_integral(const DistanceField& field, const PLFunction& u, double r, double eps) {
  if (!(eps > 0) || !(r > 0)) fail(ErrorCode::Domain, "shell_integral needs r > 0 and eps > 0");
  double area = 0.0;
  double total = band_integral(field, u, r - eps, r + eps, &area);
  if (!(area > 0)) fail(ErrorCode::EmptyShell, "shell contains no area");
  return total / (2.0 * eps);
}

double ball_integral(const DistanceField& field, const PLFunction& u, double r) {
  return band_integral(field, u, -1.0, r, nullptr);
}

double ball_volume(const DistanceField& field, double r) {
  const ConeSurface& s = field.graph->surface();
  return ball_integral(field, constant_pl(s, 1.0), r);
}

ExperimentReport green_identity_check(const ConeSurface& space, const DirichletOperator& op,
                                      const DistanceField& field, double r, double R,
                                      const PLFunction& v, const RadialProfile& phi, double h) {
  check_host(op, v);
  if (!(0 < r && r < R)) fail(ErrorCode::Domain, "green_identity_check needs 0 < r < R");
  const int nv = space.vertex_count();
  std::vector<char> in_a(nv, 0);
  int count = 0;
  for (int i = 0; i < nv; ++i)
    if (field.at(i) >= r && field.at(i) <= R && !space.is_boundary(i)) {
      in_a[i] = 1;
      ++count;
    }
  if (count == 0) fail(ErrorCode::EmptyRegion, "annulus contains no vertices");

  std::vector<double> w(nv, 0.0);
  for (int i = 0; i < nv; ++i) {
    bool needed = in_a[i];
    for (int j : space.neighbors(i)) needed = needed || in_a[j];
    if (!needed) continue;
    if (!(field.at(i) > 0)) fail(ErrorCode::Domain, "annulus is too close to the pole");
    w[i] = phi.value(field.at(i));
  }
  PLFunction wf = make_pl(space, w);

  double energy = 0.0;
  for (int f = 0; f < space.face_count(); ++f) {
    const auto& fv = space.face(f);
    if (!(in_a[fv[0]] && in_a[fv[1]] && in_a[fv[2]])) continue;
    Vec2 gw = face_gradient_of(space, f, w[fv[0]], w[fv[1]], w[fv[2]]);
    Vec2 gv = face_gradient_of(space, f, v[fv[0]], v[fv[1]], v[fv[2]]);
    energy += gw.dot(gv) * space.face_area(f);
  }
  Eigen::VectorXd lw = laplacian_on_hats(op, wf);
  double measure = 0.0;
  for (int i = 0; i < nv; ++i)
    if (in_a[i]) measure += v[i] * lw[i];
  const double lhs = energy + measure;

  const double eps = 2.0 * h;
  PLFunction abs_v = v;
  for (double& x : abs_v.values) x = std::abs(x);
  double s_outer = shell_integral(field, v, R, eps), s_inner = shell_integral(field, v, r, eps);
  double rhs = phi.derivative(R) * s_outer - phi.derivative(r) * s_inner;
  double scale = std::abs(phi.derivative(R)) * shell_integral(field, abs_v, R, eps) +
                 std::abs(phi.derivative(r)) * shell_integral(field, abs_v, r, eps);
  scale = std::max({scale, std::abs(lhs), std::abs(rhs), 1e-12});

  ExperimentReport rep;
  rep.name = "green_identity";
  rep.params = {{"r", r}, {"R", R}, {"h", h}, {"eps", eps}};
  rep.set_budget(0.05 * scale, 0.0, h);
  rep.slacks.push_back(-std::abs(lhs - rhs));
  rep.meta["lhs"] = lhs;
  rep.meta["rhs"] = rhs;
  rep.meta["energy_term"] = energy;
  rep.meta["measure_term"] = measure;
  rep.meta["relative_error"] = std::abs(lhs - rhs) / scale;
  rep.finalize();
  return rep;
}

}  // namespace alexlab
