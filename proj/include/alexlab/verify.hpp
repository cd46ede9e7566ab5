#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "alexlab/calculus.hpp"
#include "alexlab/geodesic.hpp"
#include "alexlab/hopflax.hpp"
#include "alexlab/pde.hpp"
#include "alexlab/report.hpp"

namespace alexlab {

/// Mean edge length; the h of every tolerance budget below.
double mesh_size(const ConeSurface& space);

/// Report tolerance c0 + c1 h.
struct Budget {
  double c0 = 0.0;
  double c1 = 0.0;
};

using Region = std::function<bool(int)>;

/// f(x, s) = c(x) + lambda s, evaluated with s = |grad u|^2.
struct SourceTerm {
  PLFunction c;
  double lambda = 0.0;
};

/// Slack per interior hat of the region, divided by the hat mass:
/// -int <grad phi, grad |grad u|^2> - 2 int phi (f^2/n + <grad u, grad f> - K |grad u|^2).
ExperimentReport bochner_inequality_test(const ConeSurface& space, const DirichletOperator& op,
                                         const PLFunction& u, const SourceTerm& f, double K,
                                         const Region& region, Budget budget = {0.05, 1.0});

/// Per hat and per a in the grid:
/// int phi [f(F_t) + n (a-1)^2 / t + (K t / 3)(a^2 + a + 1)|grad u_t|^2] - a^2 L_{u_t}(phi),
/// divided by the hat mass and minimised over the grid. The quadratic
/// coefficients of every hat are stored in fitted["coefficients"].
ExperimentReport key_comparison_test(std::shared_ptr<const SteinerGraph> graph,
                                     const DirichletOperator& op, const PLFunction& u,
                                     const PLFunction& f, double K, double t,
                                     const std::vector<double>& a_grid, const Region& region,
                                     Budget budget = {0.005, 0.1});

/// Q = |grad log u|^2: the L^s bound on B_p(R) and the constant
/// max_{B_p(R/2)} sqrt(Q) / (sqrt(K) + 1/R) against `cap`. `field` is centred at p.
ExperimentReport yau_gradient_report(const DirichletOperator& op, const DistanceField& field,
                                     const PLFunction& u, double R, double K, double s,
                                     double cap = 10.0, Budget budget = {0.05, 0.0});

/// Mean value inequality for a nonnegative supersolution of L_u = f vol on B_p(R).
ExperimentReport mean_value_report(const DirichletOperator& op, const DistanceField& field,
                                   const PLFunction& u, const PLFunction& f, double R,
                                   Budget budget = {0.002, 0.5});

struct PerelmanOptions {
  int geodesics = 100;
  double audit_radius = 0.0;  // 0: 0.9 delta
  int steps = 0;              // second differences per geodesic: steps - 1; 0 keeps steps >= 1.5 h, 2 to 4
  unsigned seed = 1;
  bool exact = false;  // exact polyhedral distances instead of graph distances
  Budget budget{0.05, 2.5};
};

/// h = mean of phi(d(q_a, .)) over a greedy delta-net of the sphere of radius r0 about p.
std::pair<PLFunction, ExperimentReport> perelman_concave_function(
    std::shared_ptr<const SteinerGraph> graph, int p, double r0, double delta,
    const PerelmanOptions& opts = {});

struct AuxQuadraticOptions {
  double covering_angle = 0.3141592653589793;  // pi / 10
  double audit_fraction = 0.1;                 // hats and envelope on B_p(fraction * r)
  Budget budget{0.05, 2.5};
};

/// h0 = sum over directions of phi(d(q_a, .)), q_a at distance r from p,
/// normalised to h0(p) = 0.
std::pair<PLFunction, ExperimentReport> aux_quadratic_function(
    std::shared_ptr<const SteinerGraph> graph, const DirichletOperator& op, int p, double r,
    const AuxQuadraticOptions& opts = {});

/// Direction average of one-sided difference quotients of f at vertex x,
/// at scales 4h and 8h along straight geodesics, extrapolated once.
struct DirectionDerivative {
  double integral = 0.0;   // over the direction circle, extrapolated
  double integral_rho = 0.0;
  double integral_2rho = 0.0;
  double hessian_average = 0.0;  // direction mean of (f(2 rho) - 2 f(rho) + f(0)) / rho^2
  double rho = 0.0;
  std::vector<std::pair<double, double>> samples;  // (angle, quotient at rho)
};
DirectionDerivative direction_derivative(const ConeSurface& space, const PLFunction& f, int x,
                                         int directions = 256);

ExperimentReport direction_integral_test(const ConeSurface& space, const PLFunction& f, int x,
                                         int directions = 256, Budget budget = {0.02, 1.0});

/// Shell averages of f about the field's centre against r D + r^2 H / 2.
ExperimentReport sphere_expansion_test(const DistanceField& field, const PLFunction& f,
                                       const std::vector<double>& radii,
                                       Budget budget = {0.05, 1.0});

ExperimentReport lichnerowicz_test(const ConeSurface& space, const DirichletOperator& op,
                                   double allowance = 0.05);

ExperimentReport liouville_test(const ConeSurface& space, const DirichletOperator& op,
                                unsigned seed = 1);

/// Ratios vol B_p(r) / vol B^k(r) with their monotonicity.
ExperimentReport bishop_gromov_test(const DistanceField& field, const std::vector<double>& radii,
                                    Budget budget = {0.005, 0.1});

/// u(p) against its harmonic-measure representation over balls of radius up to R.
ExperimentReport harmonic_measure_test(const DirichletOperator& op, const DistanceField& field,
                                       const PLFunction& u, double R, int m = 8,
                                       Budget budget = {0.01, 0.5});

/// Random quadruples of distinct vertices; quadruples outside the kappa domain
/// of the comparison angles are redrawn and counted.
ExperimentReport toponogov_test(DistanceCache& cache, double kappa, int quadruples,
                                unsigned seed = 1, Budget budget = {0.0, 3.0});

}  // namespace alexlab
