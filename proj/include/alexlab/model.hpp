#pragma once

#include <utility>
#include <vector>

namespace alexlab {

/// Dimension and curvature of the model space M^n_k.
struct ModelParams {
  int n = 2;
  double k = 0.0;
};

/// Below this |k| every kernel uses its flat branch.
constexpr double kFlatCurvature = 1e-12;

/// Volume of the unit sphere S^m.
double unit_sphere_volume(int m);

double generalized_sine(double k, double t);
double generalized_cosine(double k, double t);

/// Radial Green kernel of M^n_k. For n = 2 the additive constant is fixed by an
/// upper cutoff (see README); only derivatives enter the identities.
double green_kernel(const ModelParams& params, double r);
double green_kernel_derivative(const ModelParams& params, double r);

double model_sphere_area(const ModelParams& params, double r);
double model_ball_volume(const ModelParams& params, double r);

/// Ball volume in the k-cone over a direction space of measure `direction_measure`.
double cone_ball_volume(double direction_measure, const ModelParams& params, double r);

/// Angle opposite `opp` in the M^2_k triangle with sides (opp, s1, s2).
double comparison_angle(double k, double opp, double s1, double s2);

struct BishopGromovProfile {
  std::vector<double> radii;
  std::vector<double> ratios;
  bool monotone = true;
};

BishopGromovProfile bishop_gromov_profile(const std::vector<std::pair<double, double>>& ball_volumes,
                                          const ModelParams& params, double tol = 1e-9);

/// Adaptive Simpson quadrature to relative tolerance `rel_tol`.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10);

}  // namespace alexlab

#include "alexlab/detail/quadrature.hpp"
