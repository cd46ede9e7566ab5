#include "alexlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "alexlab/error.hpp"
#include "alexlab/model.hpp"

namespace alexlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDim = 2;

void check_field_host(const DirichletOperator& op, const DistanceField& field) {
  if (!field.graph || &field.graph->surface() != op.host)
    fail(ErrorCode::HostMismatch, "distance field and operator have different hosts");
}

void check_pl(const ConeSurface& s, const PLFunction& u, const char* what) {
  if (u.host != &s || u.size() != s.vertex_count())
    fail(ErrorCode::HostMismatch, std::string(what) + " is not hosted on the surface");
}

// Area-weighted vertex mean of a per-face quantity.
std::vector<double> vertex_mean(const ConeSurface& s, const std::vector<double>& per_face) {
  std::vector<double> out(s.vertex_count(), 0.0);
  for (int v = 0; v < s.vertex_count(); ++v) {
    double num = 0, den = 0;
    for (int f : s.vertex_faces(v)) {
      num += s.face_area(f) * per_face[f];
      den += s.face_area(f);
    }
    out[v] = den > 0 ? num / den : 0.0;
  }
  return out;
}

double boundary_reach(const DistanceField& field) {
  const ConeSurface& s = field.graph->surface();
  double reach = kInf;
  for (int v = 0; v < s.vertex_count(); ++v)
    if (s.is_boundary(v)) reach = std::min(reach, field.at(v));
  return reach;
}

}  // namespace

double mesh_size(const ConeSurface& space) {
  if (space.edge_count() == 0) fail(ErrorCode::Domain, "mesh_size: surface has no edges");
  double sum = 0;
  for (const Edge& e : space.edges()) sum += e.length;
  return sum / space.edge_count();
}

// ---------------------------------------------------------------- Bochner

ExperimentReport bochner_inequality_test(const ConeSurface& space, const DirichletOperator& op,
                                         const PLFunction& u, const SourceTerm& f, double K,
                                         const Region& region, Budget budget) {
  if (op.host != &space) fail(ErrorCode::HostMismatch, "operator is not assembled on the surface");
  check_pl(space, u, "u");
  check_pl(space, f.c, "c");
  if (f.lambda > 0) fail(ErrorCode::Domain, "source term must be non-increasing in |grad u|^2 (lambda > 0)");
  const double h = mesh_size(space);

  GradientField gu = face_gradient(space, u);
  PLFunction G = make_pl(space, gu.vertex_sq);
  PLFunction F = f.c;
  for (int v = 0; v < space.vertex_count(); ++v) F.values[v] += f.lambda * G[v];
  GradientField gf = face_gradient(space, F);
  std::vector<double> dot_face(space.face_count());
  for (int t = 0; t < space.face_count(); ++t) dot_face[t] = gu.face[t].dot(gf.face[t]);
  std::vector<double> dot = vertex_mean(space, dot_face);

  Eigen::VectorXd lap_G = laplacian_on_hats(op, G);
  Eigen::VectorXd lap_u = laplacian_on_hats(op, u);
  // |grad u|^2 at a vertex needs its full star, so hat neighbours stay off the boundary
  std::vector<Hat> hats = hat_functions(space, [&](int v) { return region(v) && !space.is_boundary(v); });

  ExperimentReport rep;
  rep.name = "bochner_inequality_test";
  rep.params = {{"K", K}, {"lambda", f.lambda}, {"n", kDim}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);
  double residual = 0, lo = kInf, hi = -kInf;
  std::vector<std::pair<double, double>> plot;
  for (const Hat& hat : hats) {
    int c = hat.center;
    double m = op.mass[c];
    double rhs = 2.0 * (F[c] * F[c] / kDim + dot[c] - K * G[c]);
    double slack = lap_G[c] / m - rhs;
    rep.slacks.push_back(slack);
    lo = std::min(lo, slack);
    hi = std::max(hi, slack);
    residual = std::max(residual, std::abs(lap_u[c] / m - F[c]));
    plot.push_back({static_cast<double>(c), slack});
  }
  rep.fitted = {{"min_slack_per_mass", lo}, {"max_slack_per_mass", hi}};
  rep.meta["hats"] = hats.size();
  rep.meta["normalisation"] = "slack divided by the lumped hat mass";
  // the solver hypothesis L_u = f vol, measured per hat
  rep.meta["equation_residual"] = residual;
  rep.add_plot("slack_by_vertex", std::move(plot));
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------- key comparison

ExperimentReport key_comparison_test(std::shared_ptr<const SteinerGraph> graph,
                                     const DirichletOperator& op, const PLFunction& u,
                                     const PLFunction& f, double K, double t,
                                     const std::vector<double>& a_grid, const Region& region,
                                     Budget budget) {
  if (!(t > 0)) fail(ErrorCode::Domain, "key_comparison_test needs t > 0");
  if (a_grid.empty()) fail(ErrorCode::Domain, "key_comparison_test needs a non-empty a grid");
  for (double a : a_grid)
    if (!(a > 0)) fail(ErrorCode::Domain, "a grid values must be positive");
  const ConeSurface& s = graph->surface();
  if (op.host != &s) fail(ErrorCode::HostMismatch, "operator is not assembled on the surface");
  check_pl(s, u, "u");
  check_pl(s, f, "f");
  const double h = mesh_size(s);

  std::vector<Hat> hats = hat_functions(s, region);
  HopfLaxResult hl = hopf_lax(graph, u, t);
  std::vector<char> safe(s.vertex_count(), 0);
  for (int v : audit_vertices(*graph, hl, h)) safe[v] = 1;
  for (const Hat& hat : hats) {
    bool ok = safe[hat.center];
    for (int w : s.neighbors(hat.center)) ok = ok && safe[w];
    if (!ok) fail(ErrorCode::Domain, "region touches the pruning margin");
  }

  PLFunction ut = hl.as_pl(s);
  std::vector<double> G = face_gradient(s, ut).vertex_sq;
  Eigen::VectorXd L = laplacian_on_hats(op, ut);
  Eigen::VectorXd Lu = laplacian_on_hats(op, u);

  // t0: the pruning radius sqrt(4 t osc) stays below a quarter of the inradius
  auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
  double osc = *hi - *lo;
  std::vector<double> bd = boundary_distance(*graph);
  double inradius = 0;
  for (int v = 0; v < s.vertex_count(); ++v) inradius = std::max(inradius, bd[v]);
  double t0 = osc > 0 ? (inradius / 4) * (inradius / 4) / (4 * osc) : kInf;

  ExperimentReport rep;
  rep.name = "key_comparison_test";
  rep.params = {{"K", K}, {"t", t}, {"a_grid", a_grid}, {"n", kDim}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);

  const double n = kDim;
  double worst_disc = 0, worst_vertex = 0, pre = kInf;
  nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
  for (const Hat& hat : hats) {
    int c = hat.center;
    double m = op.mass[c];
    double fF = value_at(*graph, f, hl.foot[c]);
    double kg = K * t / 3.0 * G[c];
    double A2 = m * (n / t + kg) - L[c];
    double A1 = m * (-2.0 * n / t + kg);
    double A0 = m * (fF + n / t + kg);
    auto direct = [&](double a) {
      return m * (fF + n * (a - 1) * (a - 1) / t + K * t / 3.0 * (a * a + a + 1) * G[c]) -
             a * a * L[c];
    };
    double best = kInf;
    for (double a : a_grid) {
      double d = direct(a);
      double poly = (A2 * a + A1) * a + A0;
      double scale = std::abs(A2 * a * a) + std::abs(A1 * a) + std::abs(A0);
      worst_disc = std::max(worst_disc, std::abs(d - poly) / std::max(scale, 1e-300));
      best = std::min(best, d);
    }
    if (A2 > 0) {
      double astar = -A1 / (2 * A2);
      double pmin = A0 - A1 * A1 / (4 * A2);
      double scale = std::abs(A0) + A1 * A1 / (4 * A2);
      worst_vertex = std::max(worst_vertex, std::abs(direct(astar) - pmin) / std::max(scale, 1e-300));
    }
    rep.slacks.push_back(best / m);
    coeffs.push_back({c, A2 / m, A1 / m, A0 / m});
    pre = std::min(pre, f[c] - Lu[c] / m);
  }
  rep.fitted = {{"coefficients", coeffs},
                {"coefficient_layout", "[vertex, a^2, a, 1] per unit hat mass"},
                {"max_grid_discrepancy", worst_disc},
                {"max_vertex_discrepancy", worst_vertex}};
  rep.meta["hats"] = hats.size();
  rep.meta["t0"] = t0;
  rep.meta["below_t0"] = t <= t0;
  rep.meta["prune_radius"] = hl.prune_radius;
  rep.meta["max_search_radius"] = hl.max_search_radius;
  rep.meta["ties"] = hl.ties;
  // hypothesis L_u <= f vol, per hat mass
  rep.meta["supersolution_margin"] = pre;
  rep.finalize();
  return rep;
}

// -------------------------------------------------------------------- Yau

ExperimentReport yau_gradient_report(const DirichletOperator& op, const DistanceField& field,
                                     const PLFunction& u, double R, double K, double s,
                                     double cap, Budget budget) {
  check_field_host(op, field);
  const ConeSurface& sp = field.graph->surface();
  check_pl(sp, u, "u");
  if (!(R > 0)) fail(ErrorCode::Domain, "yau_gradient_report needs R > 0");
  if (K < 0) fail(ErrorCode::Domain, "yau_gradient_report needs K >= 0");
  if (s < 2 * kDim + 4) fail(ErrorCode::Domain, "yau_gradient_report needs s >= 2n + 4");
  if (!(cap > 0)) fail(ErrorCode::Domain, "Yau constant cap must be positive");
  const double h = mesh_size(sp);
  const int nv = sp.vertex_count();
  for (int v = 0; v < nv; ++v)
    if (field.at(v) < 2 * R * (1 - 1e-9) && !(u[v] > 0))
      fail(ErrorCode::Domain, "u <= 0 in B_p(2R)");

  // Q per face from the face gradient and the face mean of u, then averaged to vertices.
  std::vector<double> qf(sp.face_count(), 0.0);
  for (int f = 0; f < sp.face_count(); ++f) {
    const auto& fv = sp.face(f);
    double mean = (u[fv[0]] + u[fv[1]] + u[fv[2]]) / 3.0;
    if (!(mean > 0)) continue;  // outside B_p(2R); never read below
    Vec2 g = face_gradient_of(sp, f, u[fv[0]], u[fv[1]], u[fv[2]]);
    qf[f] = g.squaredNorm() / (mean * mean);
  }
  std::vector<double> Q = vertex_mean(sp, qf);

  double sum = 0, max_half = 0;
  int in_ball = 0;
  for (int v = 0; v < nv; ++v) {
    double d = field.at(v);
    if (d <= R) {
      sum += op.mass[v] * std::pow(Q[v], s);
      ++in_ball;
    }
    if (d <= R / 2) max_half = std::max(max_half, std::sqrt(Q[v]));
  }
  if (in_ball == 0) fail(ErrorCode::EmptyRegion, "B_p(R) contains no vertex");
  double norm = std::pow(sum, 1.0 / s);
  double vol2R = ball_volume(field, 2 * R);
  double bound = (2 * kDim * K + 8.0 * kDim * s / (R * R)) * std::pow(vol2R, 1.0 / s);
  double chat = max_half / (std::sqrt(K) + 1.0 / R);

  ExperimentReport rep;
  rep.name = "yau_gradient_report";
  rep.params = {{"R", R}, {"K", K}, {"s", s}, {"cap", cap}, {"n", kDim}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);
  rep.slacks.push_back((bound - norm) / bound);
  rep.slacks.push_back((cap - chat) / cap);
  rep.fitted = {{"Q_Ls_norm", norm},
                {"Ls_bound", bound},
                {"vol_B2R", vol2R},
                {"max_grad_log_u", max_half},
                {"C_hat", chat},
                {"window", {{"sup_radius", R / 2}, {"norm_radius", R}}}};
  rep.meta["slack_layout"] = {"(bound - norm) / bound", "(cap - C_hat) / cap"};
  rep.finalize();
  return rep;
}

// ------------------------------------------------------------- mean value

namespace {

double shell_average(const DistanceField& field, const PLFunction& u, double r, double eps) {
  const ConeSurface& s = field.graph->surface();
  double one = shell_integral(field, constant_pl(s, 1.0), r, eps);
  if (!(one > 0)) fail(ErrorCode::EmptyShell, "shell has no measure");
  return shell_integral(field, u, r, eps) / one;
}

}  // namespace

ExperimentReport mean_value_report(const DirichletOperator& op, const DistanceField& field,
                                   const PLFunction& u, const PLFunction& f, double R,
                                   Budget budget) {
  check_field_host(op, field);
  const ConeSurface& s = field.graph->surface();
  check_pl(s, u, "u");
  check_pl(s, f, "f");
  const int p = field.source;
  if (s.is_boundary(p)) fail(ErrorCode::Domain, "mean_value_report needs an interior centre");
  if (!(R > 0)) fail(ErrorCode::Domain, "mean_value_report needs R > 0");
  const double h = mesh_size(s);
  const double eps = 2 * h;
  if (R + eps >= boundary_reach(field)) fail(ErrorCode::BallTooLarge, "R too large: the shell reaches the boundary");
  for (int v = 0; v < s.vertex_count(); ++v)
    if (field.at(v) <= R + eps && u[v] < 0) fail(ErrorCode::Domain, "negative u on B_p(R)");

  const ModelParams model{kDim, s.declared_k()};
  const double theta = s.cone_angle(p);
  const double omega = unit_sphere_volume(kDim - 1);

  ExperimentReport rep;
  rep.name = "mean_value_report";
  rep.params = {{"R", R}, {"k", model.k}, {"n", kDim}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);
  const double tol = rep.tolerance;

  std::vector<Hat> hats = hat_functions(s, [&](int v) { return field.at(v) <= R; });
  Eigen::VectorXd L = laplacian_on_hats(op, u);
  for (const Hat& hat : hats) {
    int c = hat.center;
    rep.add_check("supersolution", f[c] - L[c] / op.mass[c], tol);
  }

  double S = shell_integral(field, u, R, eps);
  double avg = shell_average(field, u, R, eps);
  double avg_model = S / (theta * std::pow(generalized_sine(model.k, R), kDim - 1));
  double GR = green_kernel(model, R);
  double rhs = 0;
  bool harmonic = true;
  for (int v = 0; v < s.vertex_count(); ++v) {
    if (f[v] != 0) harmonic = false;
    double d = field.at(v);
    if (v == p || d > R) continue;
    rhs += op.mass[v] * (green_kernel(model, d) - GR) * f[v];
  }
  double lhs = theta / omega * (avg_model - u[p]);
  rep.add_check("mean_value_inequality", rhs - lhs, tol);
  if (harmonic) rep.add_check("harmonic_lower_bound", u[p] - avg_model, tol);

  // avg(r) - u(p) = a r^2 + b r^4 through r = R/2 and R
  double d1 = shell_average(field, u, R / 2, eps) - u[p], d2 = avg - u[p];
  double a = (16 * d1 - d2) / (3 * R * R);
  double expected = f[p] / (2 * kDim);
  rep.add_check("expansion_coefficient", -std::abs(a - expected) * R * R, tol);

  rep.fitted = {{"shell_average", avg},
                {"shell_average_model", avg_model},
                {"u_p", u[p]},
                {"mean_value_gap", avg - u[p]},
                {"lhs", lhs},
                {"rhs", rhs},
                {"expansion_coefficient", a},
                {"expected_coefficient", expected},
                {"window", {R / 2, R}}};
  rep.meta["branch"] = "n2-log-analogue";
  rep.meta["cone_angle"] = theta;
  rep.meta["shell_width"] = 2 * eps;
  rep.meta["shell_average"] = "shell integral of u over shell integral of 1";
  rep.meta["shell_average_model"] = "shell integral of u over cone_angle * s_k(R)";
  rep.finalize();
  return rep;
}

// --------------------------------------------------------------- Perelman

namespace {

// Samples (arclength, value) of node data along a straight geodesic through a
// point, keeping the stretch around the start where `inside` holds.
std::vector<std::pair<double, double>> sample_line(const SteinerGraph& g,
                                                   const std::vector<double>& values,
                                                   const std::vector<double>& radial, double r1,
                                                   int face, const std::array<double, 3>& bary,
                                                   const Vec2& dir, double length) {
  std::vector<std::pair<double, double>> out;
  const ConeSurface& s = g.surface();
  for (int sign : {1, -1}) {
    GeodesicRay ray = shoot_geodesic(s, face, bary, sign * dir, length);
    for (const RayCrossing& c : ray.crossings) {
      if (node_value_on_edge(g, radial, c.edge, c.param) > r1) break;
      out.push_back({sign * c.s, node_value_on_edge(g, values, c.edge, c.param)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double interpolate_samples(const std::vector<std::pair<double, double>>& smp, double x) {
  auto it = std::lower_bound(smp.begin(), smp.end(), std::make_pair(x, -kInf));
  std::size_t i = std::clamp<std::size_t>(it - smp.begin(), 1, smp.size() - 1);
  double w = (x - smp[i - 1].first) / (smp[i].first - smp[i - 1].first);
  return (1 - w) * smp[i - 1].second + w * smp[i].second;
}

}  // namespace

std::pair<PLFunction, ExperimentReport> perelman_concave_function(
    std::shared_ptr<const SteinerGraph> graph, int p, double r0, double delta,
    const PerelmanOptions& opts) {
  const ConeSurface& s = graph->surface();
  if (p < 0 || p >= s.vertex_count()) fail(ErrorCode::Domain, "invalid centre vertex");
  if (!(r0 > 0 && delta > 0 && delta < r0 / 2)) fail(ErrorCode::Domain, "need 0 < delta < r0 / 2");
  if (opts.geodesics <= 0 || opts.steps == 1 || opts.steps < 0)
    fail(ErrorCode::Domain, "need geodesics > 0 and steps 0 (automatic) or >= 2");
  const double h = mesh_size(s);
  const double r1 = opts.audit_radius > 0 ? opts.audit_radius : 0.9 * delta;
  auto field = [&](int src) { return opts.exact ? exact_distance_field(graph, src) : distance_field(graph, src); };
  DistanceField fp = field(p);
  if (r0 + delta >= boundary_reach(fp)) fail(ErrorCode::BallTooLarge, "B_p(r0 + delta) reaches the boundary");
  if (delta < h) fail(ErrorCode::EmptyShell, "shell too sparse for a delta-net: delta below the mesh size");

  const int nv = s.vertex_count();
  std::vector<int> cand;
  for (int v = 0; v < nv; ++v)
    if (std::abs(fp.at(v) - r0) <= h / 2) cand.push_back(v);
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
    return std::abs(fp.at(a) - r0) < std::abs(fp.at(b) - r0);
  });

  auto phi = [&](double t) {
    if (t <= r0 - delta) return t;
    if (t >= r0 + delta) return r0 + delta / 2 + (t - r0 - delta) / 2;
    double x = t - (r0 - delta);
    return r0 - delta + x - x * x / (8 * delta);
  };

  // greedy net: candidates closest to the sphere first
  std::vector<int> net;
  std::vector<double> nearest(nv, kInf), hn(graph->node_count(), 0.0);
  for (int c : cand) {
    if (nearest[c] < delta) continue;
    net.push_back(c);
    DistanceField fq = field(c);
    for (int v = 0; v < nv; ++v) nearest[v] = std::min(nearest[v], fq.at(v));
    for (int node = 0; node < graph->node_count(); ++node) hn[node] += phi(fq.at(node));
  }
  if (net.size() < 3) fail(ErrorCode::EmptyShell, "shell too sparse for a delta-net");
  for (double& x : hn) x /= static_cast<double>(net.size());
  PLFunction hv = make_pl(s, std::vector<double>(hn.begin(), hn.begin() + nv));

  ExperimentReport rep;
  rep.name = "perelman_concave_function";
  rep.params = {{"p", p},         {"r0", r0},         {"delta", delta},   {"audit_radius", r1},
                {"geodesics", opts.geodesics}, {"steps", opts.steps}, {"seed", opts.seed}, {"exact", opts.exact}, {"h", h}};
  rep.set_budget(opts.budget.c0, opts.budget.c1, h);
  const double tol = rep.tolerance;

  // (a) second differences along straight geodesics through B_p(r1 / 2)
  std::vector<int> faces;
  for (int f = 0; f < s.face_count(); ++f) {
    const auto& fv = s.face(f);
    if ((fp.at(fv[0]) + fp.at(fv[1]) + fp.at(fv[2])) / 3 <= r1 / 2) faces.push_back(f);
  }
  if (faces.empty()) fail(ErrorCode::EmptyRegion, "audit ball contains no face");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, faces.size() - 1);
  double min_modulus = kInf, step_sum = 0;
  int traced = 0, attempts = 0;
  std::vector<std::pair<double, double>> plot;
  while (traced < opts.geodesics) {
    if (++attempts > 20 * opts.geodesics) fail(ErrorCode::EmptyRegion, "audit ball too small for the geodesic sample");
    int f = faces[pick(rng)];
    double b1 = unif(rng), b2 = unif(rng);
    if (b1 + b2 > 1) b1 = 1 - b1, b2 = 1 - b2;
    double ang = 2 * kPi * unif(rng);
    auto smp = sample_line(*graph, hn, fp.dist, r1, f, {1 - b1 - b2, b1, b2},
                           Vec2(std::cos(ang), std::sin(ang)), 2 * r1 + h);
    if (smp.size() < 3) continue;
    double lo = smp.front().first, hi = smp.back().first;
    if (hi - lo < 2 * h) continue;
    // steps below the mesh size see the PL kinks, not the concavity
    int steps = opts.steps > 0 ? opts.steps : std::clamp(static_cast<int>((hi - lo) / (1.5 * h)), 2, 4);
    double sigma = (hi - lo) / steps;
    for (int k = 1; k < steps; ++k) {
      double d2 = interpolate_samples(smp, lo + (k - 1) * sigma) -
                  2 * interpolate_samples(smp, lo + k * sigma) +
                  interpolate_samples(smp, lo + (k + 1) * sigma);
      double modulus = -d2 / (sigma * sigma);
      min_modulus = std::min(min_modulus, modulus);
      rep.add_check("concavity", modulus - 1.0, tol);
    }
    plot.push_back({static_cast<double>(traced), sigma});
    step_sum += sigma;
    ++traced;
  }

  // (b) edge slopes over the whole surface
  double lip = 0;
  for (const Edge& e : s.edges()) lip = std::max(lip, std::abs(hv[e.v0] - hv[e.v1]) / e.length);
  rep.add_check("lipschitz", 2.0 - lip, tol);

  // (c) direction integrals at singular vertices of the audit ball
  int singular = 0;
  double worst_integral = -kInf;
  for (int v : s.singular_vertices()) {
    if (fp.at(v) > r1) continue;
    DirectionDerivative dd = direction_derivative(s, hv, v);
    rep.add_check("direction_integral", -dd.integral, tol);
    worst_integral = std::max(worst_integral, dd.integral);
    ++singular;
  }

  rep.fitted = {{"min_modulus", min_modulus},
                {"lipschitz", lip},
                {"net_size", net.size()},
                {"mean_step", step_sum / traced},
                {"window", {{"audit_radius", r1}}}};
  if (singular > 0) rep.fitted["max_direction_integral"] = worst_integral;
  rep.meta["net"] = net;
  rep.meta["geodesic_attempts"] = attempts;
  rep.meta["singular_audited"] = singular;
  rep.add_plot("step_by_geodesic", std::move(plot));
  rep.finalize();
  return {hv, rep};
}

// ------------------------------------------------------- aux quadratic h0

std::pair<PLFunction, ExperimentReport> aux_quadratic_function(
    std::shared_ptr<const SteinerGraph> graph, const DirichletOperator& op, int p, double r,
    const AuxQuadraticOptions& opts) {
  const ConeSurface& s = graph->surface();
  if (op.host != &s) fail(ErrorCode::HostMismatch, "operator is not assembled on the surface");
  if (p < 0 || p >= s.vertex_count() || s.is_boundary(p)) fail(ErrorCode::Domain, "need an interior centre vertex");
  if (!(r > 0)) fail(ErrorCode::Domain, "aux_quadratic_function needs r > 0");
  if (!(opts.covering_angle > 0)) fail(ErrorCode::Domain, "covering angle must be positive");
  const double h = mesh_size(s);
  const double theta = s.cone_angle(p);
  const int N = static_cast<int>(std::ceil(theta / (2 * opts.covering_angle) - 1e-12));

  std::vector<int> qs;
  for (int a = 0; a < N; ++a) {
    GeodesicRay ray = shoot_from_vertex(s, p, (a + 0.5) * theta / N, r);
    if (ray.stopped) fail(ErrorCode::Domain, "covering construction fails: boundary or cone point within r");
    int c = static_cast<int>(std::max_element(ray.end_bary.begin(), ray.end_bary.end()) - ray.end_bary.begin());
    qs.push_back(s.face(ray.end_face)[c]);
  }

  // phi' (r) = 0 and phi'' + phi' / t = 2 / N: a quadratic minimum at p and L h0 = 2 vol on the flat part
  auto phi = [&](double t) { return ((t * t - r * r) / 2 - r * r * std::log(t / r)) / N; };
  const int nv = s.vertex_count();
  std::vector<double> h0(nv, 0.0);
  for (int q : qs) {
    DistanceField fq = distance_field(graph, q);
    for (int v = 0; v < nv; ++v) h0[v] += v == q ? 0.0 : phi(fq.at(v));
  }
  double raw = h0[p];
  for (double& x : h0) x -= raw;

  DistanceField fp = distance_field(graph, p);
  const double r2 = opts.audit_fraction * r;
  ExperimentReport rep;
  rep.name = "aux_quadratic_function";
  rep.params = {{"p", p}, {"r", r}, {"directions", N}, {"covering_angle", opts.covering_angle},
                {"audit_radius", r2}, {"h", h}};
  rep.set_budget(opts.budget.c0, opts.budget.c1, h);
  const double tol = rep.tolerance;

  PLFunction hp = make_pl(s, h0);
  Eigen::VectorXd L = laplacian_on_hats(op, hp);
  double min_lap = kInf;
  for (const Hat& hat : hat_functions(s, [&](int v) { return fp.at(v) <= r2; })) {
    double q = L[hat.center] / op.mass[hat.center];
    min_lap = std::min(min_lap, q);
    rep.add_check("laplacian", q - 1.0, tol);
  }

  double c_lo = kInf, c_hi = -kInf, sxy = 0, sxx = 0;
  std::vector<std::pair<double, double>> plot;
  for (int v = 0; v < nv; ++v) {
    double d = fp.at(v);
    if (v == p || d > r2) continue;
    double ratio = h0[v] / (d * d);
    c_lo = std::min(c_lo, ratio);
    c_hi = std::max(c_hi, ratio);
    sxy += h0[v] * d * d;
    sxx += d * d * d * d;
    plot.push_back({d, h0[v]});
  }
  if (plot.empty()) fail(ErrorCode::EmptyRegion, "envelope window contains no vertex");
  std::sort(plot.begin(), plot.end());
  rep.add_exact("envelope_positive", c_lo > 0);
  rep.fitted = {{"c", c_lo},
                {"C", c_hi},
                {"least_squares", sxy / sxx},
                {"min_laplacian", min_lap},
                {"window", {{"radius", r2}}}};
  rep.meta["h0_p_before_normalisation"] = raw;
  rep.meta["h0_p"] = h0[p];
  rep.meta["directions"] = qs;
  rep.add_plot("h0_vs_distance", std::move(plot));
  rep.finalize();
  return {hp, rep};
}

// ------------------------------------------------------- direction integral

DirectionDerivative direction_derivative(const ConeSurface& space, const PLFunction& f, int x,
                                         int directions) {
  check_pl(space, f, "f");
  if (x < 0 || x >= space.vertex_count()) fail(ErrorCode::Domain, "invalid vertex");
  if (space.is_boundary(x)) fail(ErrorCode::Domain, "direction derivatives need an interior vertex");
  if (directions < 8) fail(ErrorCode::Domain, "need at least 8 directions");
  DirectionDerivative out;
  out.rho = 4 * mesh_size(space);
  const double theta = space.cone_angle(x);
  const double w = theta / directions;
  for (int j = 0; j < directions; ++j) {
    double ang = (j + 0.5) * w;
    GeodesicRay a = shoot_from_vertex(space, x, ang, out.rho);
    GeodesicRay b = shoot_from_vertex(space, x, ang, 2 * out.rho);
    if (a.stopped || b.stopped) fail(ErrorCode::Domain, "direction rays leave the surface or meet a cone point");
    double fa = a.end_value(space, f.values), fb = b.end_value(space, f.values);
    double qa = (fa - f[x]) / out.rho, qb = (fb - f[x]) / (2 * out.rho);
    out.integral_rho += qa * w;
    out.integral_2rho += qb * w;
    out.hessian_average += (fb - 2 * fa + f[x]) / (out.rho * out.rho) / directions;
    out.samples.push_back({ang, qa});
  }
  out.integral = 2 * out.integral_rho - out.integral_2rho;
  return out;
}

ExperimentReport direction_integral_test(const ConeSurface& space, const PLFunction& f, int x,
                                         int directions, Budget budget) {
  DirectionDerivative dd = direction_derivative(space, f, x, directions);
  const double h = mesh_size(space);
  ExperimentReport rep;
  rep.name = "direction_integral_test";
  rep.params = {{"x", x}, {"directions", directions}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);
  rep.slacks.push_back(-dd.integral);
  rep.fitted = {{"integral", dd.integral},
                {"integral_rho", dd.integral_rho},
                {"integral_2rho", dd.integral_2rho},
                {"cone_angle", space.cone_angle(x)},
                {"window", {{"rho", dd.rho}, {"two_rho", 2 * dd.rho}}}};
  rep.add_plot("quotient_vs_angle", dd.samples);
  rep.finalize();
  return rep;
}

// -------------------------------------------------------- sphere expansion

ExperimentReport sphere_expansion_test(const DistanceField& field, const PLFunction& f,
                                       const std::vector<double>& radii, Budget budget) {
  const ConeSurface& s = field.graph->surface();
  check_pl(s, f, "f");
  const int p = field.source;
  const double h = mesh_size(s);
  double R = boundary_reach(field);
  if (!std::isfinite(R)) R = *std::max_element(field.dist.begin(), field.dist.end());
  if (radii.empty()) fail(ErrorCode::Domain, "sphere_expansion_test needs radii");
  for (double r : radii)
    if (r < 4 * h - 1e-12 || r > R / 4 + 1e-12)
      fail(ErrorCode::Domain, "radii outside the resolution band [4h, R/4]");

  DirectionDerivative dd = direction_derivative(s, f, p);
  const double theta = s.cone_angle(p);
  const double D = dd.integral / theta;
  const double H = dd.hessian_average;

  ExperimentReport rep;
  rep.name = "sphere_expansion_test";
  rep.params = {{"p", p}, {"radii", radii}, {"n", kDim}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);
  std::vector<std::pair<double, double>> plot, lr1, lr2;
  for (double r : radii) {
    // shell means carry an eps^2 bias; extrapolate over the widths h and 2h
    double mean = (4 * shell_average(field, f, r, h) - shell_average(field, f, r, 2 * h)) / 3;
    double delta = mean - f[p];
    double res1 = delta - r * D;
    double res2 = res1 - r * r * H / 2;
    rep.add_check("second_order", -std::abs(res2) / (r * r), rep.tolerance);
    plot.push_back({r, delta});
    if (std::abs(res1) > 0) lr1.push_back({std::log(r), std::log(std::abs(res1))});
    if (std::abs(res2) > 0) lr2.push_back({std::log(r), std::log(std::abs(res2))});
  }
  auto slope = [](const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (auto [x, y] : pts) mx += x, my += y;
    mx /= pts.size(), my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    return sxy / sxx;
  };
  rep.fitted = {{"direction_mean_derivative", D},
                {"hessian_average", H},
                {"first_order_residual_order", slope(lr1)},
                {"second_order_residual_order", slope(lr2)},
                {"window", {radii.front(), radii.back()}}};
  rep.meta["hessian_average"] = H;
  rep.meta["first_order_term"] = "r * direction mean of d_p f";
  rep.add_plot("shell_mean_minus_centre", std::move(plot));
  rep.finalize();
  return rep;
}

// -------------------------------------------------- closed-surface spectra

ExperimentReport lichnerowicz_test(const ConeSurface& space, const DirichletOperator& op,
                                   double allowance) {
  if (space.has_boundary()) fail(ErrorCode::NotClosed, "lichnerowicz_test needs a closed surface");
  const double k = space.declared_k();
  if (!(k > 0)) fail(ErrorCode::Domain, "lichnerowicz_test needs a declared positive curvature bound");
  if (!(allowance > 0 && allowance < 1)) fail(ErrorCode::Domain, "allowance must lie in (0, 1)");
  const double h = mesh_size(space);
  // Ric >= (n - 1) k gives lambda_1 >= n k
  const double bound = kDim * k;
  Eigenpair ep = first_nonzero_eigenpair(space, op);

  ExperimentReport rep;
  rep.name = "lichnerowicz_test";
  rep.params = {{"declared_k", k}, {"allowance", allowance}, {"n", kDim}, {"h", h}};
  rep.set_budget(allowance * bound, 0.0, h);
  rep.slacks.push_back(ep.lambda - bound);
  rep.fitted = {{"lambda1", ep.lambda}, {"bound", bound}, {"residual", ep.residual},
                {"iterations", ep.iterations}};
  rep.finalize();
  return rep;
}

ExperimentReport liouville_test(const ConeSurface& space, const DirichletOperator& op,
                                unsigned seed) {
  if (space.has_boundary()) fail(ErrorCode::NotClosed, "liouville_test needs a closed surface");
  const int nv = space.vertex_count();
  const double h = mesh_size(space);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int cap = 50 * static_cast<int>(std::sqrt(nv)) + 1000;

  // L_u = 0 from a random zero-mean start: CG must drive u to zero
  Eigen::VectorXd x(nv);
  for (int v = 0; v < nv; ++v) x[v] = unif(rng);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(nv);
  CGResult hom = conjugate_gradient(op.stiffness, zero, x, 0.0, cap, &op.mass, 1e-14);
  double sup = x.cwiseAbs().maxCoeff();

  // solvability control: zero-mean data has a zero-mean solution
  Eigen::VectorXd f(nv);
  for (int v = 0; v < nv; ++v) f[v] = unif(rng);
  f.array() -= op.mass.dot(f) / op.mass.sum();
  Eigen::VectorXd b = -op.mass.cwiseProduct(f), y = Eigen::VectorXd::Zero(nv);
  CGResult inh = conjugate_gradient(op.stiffness, b, y, 1e-10, cap, &op.mass);
  double rel = (op.stiffness * y - b).norm() / b.norm();

  ExperimentReport rep;
  rep.name = "liouville_test";
  rep.params = {{"seed", seed}, {"h", h}};
  rep.set_budget(1e-12, 0.0, h);
  rep.slacks.push_back(1e-8 - sup);
  rep.add_exact("solvability", rel <= 1e-8);
  rep.fitted = {{"sup_u", sup}, {"iterations", hom.iterations},
                {"solvability_residual", rel}, {"solvability_iterations", inh.iterations}};
  rep.meta["singular_vertices"] = space.singular_vertices().size();
  rep.meta["slack_layout"] = "1e-8 - sup |u|";
  rep.finalize();
  return rep;
}

// ------------------------------------------------------ volume comparison

ExperimentReport bishop_gromov_test(const DistanceField& field, const std::vector<double>& radii,
                                    Budget budget) {
  const ConeSurface& s = field.graph->surface();
  const int p = field.source;
  const double h = mesh_size(s);
  if (radii.empty()) fail(ErrorCode::Domain, "bishop_gromov_test needs radii");
  double reach = boundary_reach(field);
  std::vector<std::pair<double, double>> vols;
  for (double r : radii) {
    if (r >= reach) fail(ErrorCode::BallTooLarge, "ball reaches the boundary");
    vols.push_back({r, ball_volume(field, r)});
  }
  const ModelParams model{kDim, s.declared_k()};
  BishopGromovProfile prof = bishop_gromov_profile(vols, model, kInf);
  const double expected = s.is_boundary(p) ? kInf : s.cone_angle(p) / unit_sphere_volume(kDim - 1);

  ExperimentReport rep;
  rep.name = "bishop_gromov_test";
  rep.params = {{"p", p}, {"radii", radii}, {"k", model.k}, {"n", kDim}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);
  double dev = 0;
  std::vector<std::pair<double, double>> plot;
  for (std::size_t i = 0; i < prof.ratios.size(); ++i) {
    if (i > 0) rep.add_check("monotone", prof.ratios[i - 1] - prof.ratios[i], rep.tolerance);
    if (std::isfinite(expected)) dev = std::max(dev, std::abs(prof.ratios[i] / expected - 1));
    plot.push_back({prof.radii[i], prof.ratios[i]});
  }
  rep.fitted = {{"ratios", prof.ratios}, {"window", {radii.front(), radii.back()}}};
  if (std::isfinite(expected)) {
    rep.fitted["expected_ratio"] = expected;
    rep.fitted["max_relative_deviation"] = dev;
  }
  rep.add_plot("volume_ratio", std::move(plot));
  rep.finalize();
  return rep;
}

ExperimentReport harmonic_measure_test(const DirichletOperator& op, const DistanceField& field,
                                       const PLFunction& u, double R, int m, Budget budget) {
  check_field_host(op, field);
  const ConeSurface& s = field.graph->surface();
  check_pl(s, u, "u");
  const int p = field.source;
  const double h = mesh_size(s);
  HarmonicMeasure hm = harmonic_measure(s, op, field, R, m);
  double value = hm_integrate(hm, u);
  std::vector<double> mu = hm.mu(u);

  ExperimentReport rep;
  rep.name = "harmonic_measure_test";
  rep.params = {{"p", p}, {"R", R}, {"m", m}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);
  rep.add_check("representation", -std::abs(value - u[p]), rep.tolerance);
  std::vector<std::pair<double, double>> plot;
  for (std::size_t i = 0; i < mu.size(); ++i) plot.push_back({hm.radii[i], mu[i]});
  rep.fitted = {{"representation", value}, {"u_p", u[p]}, {"mu", mu}};
  rep.add_plot("mu_vs_radius", std::move(plot));
  rep.finalize();
  return rep;
}

ExperimentReport toponogov_test(DistanceCache& cache, double kappa, int quadruples, unsigned seed,
                                Budget budget) {
  const ConeSurface& s = cache.surface();
  if (quadruples <= 0) fail(ErrorCode::Domain, "need a positive number of quadruples");
  if (s.vertex_count() < 4) fail(ErrorCode::Domain, "need at least four vertices");
  const double h = mesh_size(s);
  ExperimentReport rep;
  rep.name = "toponogov_test";
  rep.params = {{"kappa", kappa}, {"quadruples", quadruples}, {"seed", seed}, {"h", h}};
  rep.set_budget(budget.c0, budget.c1, h);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, s.vertex_count() - 1);
  int checked = 0, redrawn = 0;
  double worst = -kInf;
  while (checked < quadruples) {
    if (redrawn > 20 * quadruples) fail(ErrorCode::Domain, "too many quadruples outside the kappa domain");
    int q[4] = {pick(rng), pick(rng), pick(rng), pick(rng)};
    bool distinct = true;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < i; ++j) distinct = distinct && q[i] != q[j];
    if (!distinct) continue;
    double sum;
    try {
      sum = toponogov_angle_sum(cache, q[0], q[1], q[2], q[3], kappa);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PerimeterTooLarge && e.code() != ErrorCode::Domain) throw;
      ++redrawn;
      continue;
    }
    worst = std::max(worst, sum - 2 * kPi);
    rep.add_check("angle_sum", 2 * kPi - sum, rep.tolerance);
    ++checked;
  }
  rep.fitted = {{"max_excess", worst}, {"redrawn", redrawn}};
  rep.finalize();
  return rep;
}

}  // namespace alexlab
