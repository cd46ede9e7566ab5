#pragma once

#include <functional>
#include <vector>

#include "alexlab/calculus.hpp"
#include "alexlab/model.hpp"

namespace alexlab {

struct SolverOptions {
  double tol = 1e-10;          // relative residual
  double iteration_factor = 50.0;  // cap = factor * sqrt(unknowns)
};

/// Minimises E(v) = int |grad v|^2 + 2 f v with v = g on `fixed` vertices,
/// i.e. L_u = f vol in the interior. Empty `fixed` means the mesh boundary.
PLFunction solve_dirichlet(const DirichletOperator& op, const PLFunction& f, const PLFunction& g,
                           const std::vector<char>& fixed, const SolverOptions& opts = {});

PLFunction solve_poisson_dirichlet(const ConeSurface& space, const DirichletOperator& op,
                                   const PLFunction& f, const PLFunction& g, double tol = 1e-10);

enum class PrincipleSide {
  Sub,    // max over the region is attained on its boundary
  Super,  // min over the region is attained on its boundary
};

/// Region boundary: region vertices on the mesh boundary or next to a vertex
/// outside the region.
ExperimentReport check_maximum_principle(const ConeSurface& space, const PLFunction& u,
                                         const std::function<bool(int)>& region,
                                         PrincipleSide side = PrincipleSide::Sub,
                                         double tol = 1e-9);

/// min over hats of int f phi - L_u(phi).
double supersolution_slack(const DirichletOperator& op, const PLFunction& u, const PLFunction& f,
                           const std::vector<Hat>& hats);

struct Eigenpair {
  double lambda = 0.0;
  PLFunction u;
  double residual = 0.0;
  int iterations = 0;
};

Eigenpair first_nonzero_eigenpair(const ConeSurface& space, const DirichletOperator& op,
                                  double tol = 1e-8);

/// Harmonic measures of p for the balls B_p(r_i), r_i = i R / m. For each
/// radius the weights give u_r(p) = sum_b w_b phi(b) over the ball's node
/// boundary, so any data can be integrated afterwards.
struct HarmonicMeasure {
  int center = -1;
  double R = 0.0;
  double k = 0.0;
  int n = 2;
  std::vector<double> radii;
  std::vector<double> weights;  // s_k^{n-1}(r_i)
  std::vector<std::vector<std::pair<int, double>>> boundary_weights;

  /// mu(r_i) for data phi.
  std::vector<double> mu(const PLFunction& phi) const;
};

HarmonicMeasure harmonic_measure(const ConeSurface& space, const DirichletOperator& op,
                                 const DistanceField& field, double R, int m);
/// Weighted trapezoid quotient over [0, R] with mu(0) = phi(p).
double hm_integrate(const HarmonicMeasure& hm, const PLFunction& phi);

/// Preconditioned conjugate gradients for SPD A. When `project` is set the
/// iterates are kept mass-orthogonal to constants (mass given).
struct CGResult {
  int iterations = 0;
  double residual = 0.0;
};
CGResult conjugate_gradient(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                            Eigen::VectorXd& x, double tol, int max_iter,
                            const Eigen::VectorXd* project_mass = nullptr,
                            double abs_tol = 0.0);

}  // namespace alexlab
