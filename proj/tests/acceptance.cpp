// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "alexlab/verify.hpp"

using namespace alexlab;
using std::numbers::pi;

namespace {

int failures = 0;

void line(int id, const std::string& title, bool ok, const std::string& detail, double seconds) {
  std::printf("[%s] %02d %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Runs one criterion; errors count as failures with their message.
void criterion(int id, const std::string& title, const std::function<std::pair<bool, std::string>()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::pair<bool, std::string> r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("error: ") + e.what()};
  }
  line(id, title, r.first, r.second, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

int first_rim_vertex(const ConeSurface& s) {
  for (int v = 0; v < s.vertex_count(); ++v)
    if (s.is_boundary(v)) return v;
  return -1;
}

double check_margin(const ExperimentReport& r, const char* check) {
  return r.meta["checks"][check]["min_margin"].get<double>();
}

}  // namespace

int main() {
  criterion(1, "harmonic solve exactness", [] {
    ConeSurface s = flat_disk(1.0, 0.05);
    DirichletOperator op = assemble_dirichlet(s);
    PLFunction g = sample_pl(s, [](const Vec3& p) { return 1 + p.x(); });
    PLFunction u = solve_poisson_dirichlet(s, op, constant_pl(s, 0.0), g);
    double err = 0;
    for (int v = 0; v < s.vertex_count(); ++v) err = std::max(err, std::abs(u[v] - g[v]));
    return std::pair{err <= 1e-8, fmt("sup error %.3g <= 1e-8", err)};
  });

  criterion(2, "mean value equality", [] {
    ConeSurface s = flat_disk(1.0, 0.02);
    DirichletOperator op = assemble_dirichlet(s);
    auto g = std::make_shared<SteinerGraph>(s, 0.02);
    PLFunction u = sample_pl(s, [](const Vec3& p) { return p.x() * p.x() - p.y() * p.y() + 5; });
    ExperimentReport r = mean_value_report(op, exact_distance_field(g, 0), u, constant_pl(s, 0.0), 0.5);
    double avg = r.fitted["shell_average"].get<double>();
    return std::pair{std::abs(avg - 5) <= 1e-2 && r.pass,
                     fmt("shell average %.10f, |avg - 5| <= 1e-2; report pass=%d", avg, r.pass)};
  });

  criterion(3, "Bochner equality and strict cases", [] {
    ConeSurface s = flat_disk(1.0, 0.05);
    DirichletOperator op = assemble_dirichlet(s);
    Region all = [](int) { return true; };
    PLFunction bowl = sample_pl(s, [](const Vec3& p) { return (p.x() * p.x() + p.y() * p.y()) / 2; });
    PLFunction saddle = sample_pl(s, [](const Vec3& p) { return (p.x() * p.x() - p.y() * p.y()) / 2; });
    ExperimentReport eq = bochner_inequality_test(s, op, bowl, {constant_pl(s, 2.0), 0.0}, 0.0, all);
    ExperimentReport st = bochner_inequality_test(s, op, saddle, {constant_pl(s, 0.0), 0.0}, 0.0, all);
    double worst = 0, lo = 1e300, hi = -1e300;
    for (double x : eq.slacks) worst = std::max(worst, std::abs(x));
    for (double x : st.slacks) lo = std::min(lo, x), hi = std::max(hi, x);
    bool ok = worst <= 0.1 && lo >= 3.5 && hi <= 4.5;
    return std::pair{ok, fmt("equality max |slack|/int phi %.3g <= 0.1 over %zu hats; strict slack/int phi in "
                             "[%.6f, %.6f] within [3.5, 4.5]",
                             worst, eq.slacks.size(), lo, hi)};
  });

  criterion(4, "key comparison, Q_t of harmonic is superharmonic", [] {
    ConeSurface s = flat_disk(1.0, 0.05);
    DirichletOperator op = assemble_dirichlet(s);
    auto g = std::make_shared<SteinerGraph>(s, 0.05);
    PLFunction zero = constant_pl(s, 0.0);
    PLFunction u = solve_poisson_dirichlet(s, op, zero, sample_pl(s, [](const Vec3& p) { return 1 + p.x(); }));
    ExperimentReport r = key_comparison_test(g, op, u, zero, 0.0, 0.02, {1.0},
                                             [&](int v) { return s.position(v).norm() <= 0.4; });
    // with f = 0, K = 0, a = 1 the slack is -L_{u_t}(phi) / int phi
    double worst = -r.min_slack();
    return std::pair{worst <= 1e-2, fmt("max L(phi)/int phi %.3g <= 1e-2 over %zu hats", worst, r.slacks.size())};
  });

  criterion(5, "Hopf-Lax closed form and footpoint identity", [] {
    ConeSurface s = flat_disk(1.0, 0.02);
    auto g = std::make_shared<SteinerGraph>(s, 0.02);
    PLFunction u = make_pl(s, distance_field(g, 0).vertex_values());
    const double t = 0.2;
    HopfLaxResult hl = hopf_lax(g, u, t);
    double err = 0;
    for (int v = 0; v < s.vertex_count(); ++v) {
      double d = s.position(v).norm();
      err = std::max(err, std::abs(hl.values[v] - (d >= t ? d - t / 2 : d * d / (2 * t))));
    }
    ExperimentReport fp = footpoint_audit(*g, hl, u, mesh_size(s), 0.05);
    double id = fp.fitted["max_identity_violation"].get<double>();
    bool ok = err <= 0.05 && id <= 0.05;
    return std::pair{ok, fmt("max node error %.4f <= 0.05; max | |xF_t| - t|grad u_t| | %.4f <= 0.05 on %d nodes",
                             err, id, fp.meta["checks"]["identity"]["samples"].get<int>())};
  });

  criterion(6, "Yau gradient estimate", [] {
    ConeSurface s = flat_disk(1.0, 0.05);
    DirichletOperator op = assemble_dirichlet(s);
    auto g = std::make_shared<SteinerGraph>(s, 0.05);
    PLFunction u = sample_pl(s, [](const Vec3& p) { return 1 + p.x(); });
    ExperimentReport r = yau_gradient_report(op, exact_distance_field(g, 0), u, 0.5, 0.0, 8.0);
    double m = r.fitted["max_grad_log_u"].get<double>();
    double norm = r.fitted["Q_Ls_norm"].get<double>(), bound = r.fitted["Ls_bound"].get<double>();
    bool ok = std::abs(m / (4.0 / 3) - 1) <= 0.05 && bound - norm >= 0;
    return std::pair{ok, fmt("max |grad log u| %.4f vs 4/3 (%.2f%%); ||Q||_L8 %.4f <= bound %.2f", m,
                             100 * std::abs(m / (4.0 / 3) - 1), norm, bound)};
  });

  criterion(7, "Lichnerowicz on icosphere(4)", [] {
    ConeSurface s = icosphere(4);
    ExperimentReport r = lichnerowicz_test(s, assemble_dirichlet(s));
    double l = r.fitted["lambda1"].get<double>();
    return std::pair{l >= 1.9 && l <= 2.05 && r.pass, fmt("lambda_1 %.5f in [1.9, 2.05]", l)};
  });

  criterion(8, "cone geometry, theta = 3 pi / 2", [] {
    ConeSurface s = cone_disk(1.5 * pi, 1.0, 0.02);
    DirichletOperator op = assemble_dirichlet(s);
    auto g = std::make_shared<SteinerGraph>(s, 0.02);
    DistanceField fp = exact_distance_field(g, 0);
    ExperimentReport bg = bishop_gromov_test(fp, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
    double dev = bg.fitted["max_relative_deviation"].get<double>();
    DistanceField fq = exact_distance_field(g, first_rim_vertex(s));
    ExperimentReport di = direction_integral_test(s, make_pl(s, fq.vertex_values()), 0);
    double I = di.fitted["integral"].get<double>();
    PLFunction u = solve_poisson_dirichlet(s, op, constant_pl(s, 0.0), sample_pl(s, [](const Vec3& p) { return 2 + p.x(); }));
    ExperimentReport hm = harmonic_measure_test(op, fp, u, 0.8);
    double gap = std::abs(hm.fitted["representation"].get<double>() - hm.fitted["u_p"].get<double>());
    bool ok = dev <= 0.01 && std::abs(I + std::sqrt(2.0)) <= 0.1 && gap <= 2e-2;
    return std::pair{ok, fmt("BG ratio max deviation from 0.75 %.3f%% <= 1%%; direction integral %.4f vs -sqrt 2 "
                             "(+-0.1); harmonic measure gap %.2g <= 2e-2",
                             100 * dev, I, gap)};
  });

  criterion(9, "Perelman concave function", [] {
    ConeSurface s = flat_disk(1.0, 0.02);
    auto g = std::make_shared<SteinerGraph>(s, 0.02);
    auto [h, r] = perelman_concave_function(g, 0, 0.8, 0.05, {.geodesics = 100});
    double mod = r.fitted["min_modulus"].get<double>(), lip = r.fitted["lipschitz"].get<double>();
    int chords = r.meta["checks"]["concavity"]["samples"].get<int>();
    return std::pair{mod >= 0.9 && lip <= 2.05,
                     fmt("min concavity modulus %.3f >= 0.9 over %d geodesics; Lip %.3f <= 2.05", mod, chords, lip)};
  });

  criterion(10, "Liouville on flat_torus(1, 1/64)", [] {
    ConeSurface s = flat_torus(1.0, 1.0 / 64);
    ExperimentReport r = liouville_test(s, assemble_dirichlet(s));
    double sup = r.fitted["sup_u"].get<double>();
    return std::pair{sup <= 1e-8 && r.pass, fmt("sup |u| %.3g <= 1e-8", sup)};
  });

  criterion(11, "semigroup audit", [] {
    ConeSurface s = flat_disk(1.0, 0.05);
    auto g = std::make_shared<SteinerGraph>(s, 0.05);
    PLFunction u = sample_pl(s, [](const Vec3& p) { return 1 + p.x(); });
    ExperimentReport r = semigroup_audit(g, u, {0.05, 0.1, 0.2}, mesh_size(s), 0.05);
    int viol = r.meta["checks"]["monotone"]["violations"].get<int>();
    double bound = check_margin(r, "lip_bound");
    double deriv = 0;
    for (const auto& p : r.fitted["pairs"]) deriv = std::max(deriv, p["max_derivative_error"].get<double>());
    bool ok = viol == 0 && bound >= -1e-12 && deriv <= 0.05;
    return std::pair{ok, fmt("monotone violations %d; min bound margin %.3g >= -1e-12; max |derivative + 1/2| %.3g <= 0.05",
                             viol, bound, deriv)};
  });

  criterion(12, "Toponogov quadruples", [] {
    ConeSurface sphere = icosphere(3), torus = flat_torus(1.0, 1.0 / 16);
    DistanceCache cs(sphere, mesh_size(sphere) / 8), ct(torus, mesh_size(torus) / 8);
    ExperimentReport a = toponogov_test(cs, 1.0, 1000), b = toponogov_test(ct, 0.0, 1000);
    auto passed = [](const ExperimentReport& r) {
      int n = 0;
      for (double x : r.slacks) n += x >= -r.tolerance;
      return n;
    };
    bool ok = a.pass && b.pass;
    return std::pair{ok, fmt("sphere %d/1000 (worst excess %.3f, tol 3h %.3f); torus %d/1000 (worst %.3f, tol %.3f)",
                             passed(a), -a.min_slack(), a.tolerance, passed(b), -b.min_slack(), b.tolerance)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
