#pragma once

#include <functional>
#include <vector>

#include <Eigen/SparseCore>

#include "alexlab/geodesic.hpp"
#include "alexlab/report.hpp"
#include "alexlab/surface.hpp"

namespace alexlab {

/// Piecewise-linear function given by its values at the mesh vertices.
struct PLFunction {
  const ConeSurface* host = nullptr;
  std::vector<double> values;

  double operator[](int v) const { return values[v]; }
  int size() const { return static_cast<int>(values.size()); }
};

PLFunction make_pl(const ConeSurface& space, std::vector<double> values);
PLFunction constant_pl(const ConeSurface& space, double c);
/// Samples a function of the embedding coordinates.
PLFunction sample_pl(const ConeSurface& space, const std::function<double(const Vec3&)>& fn);

struct GradientField {
  std::vector<Vec2> face;          // in each face's chart
  std::vector<double> vertex_sq;   // area-weighted mean of incident |grad|^2
};

GradientField face_gradient(const ConeSurface& space, const PLFunction& u);
Vec2 face_gradient_of(const ConeSurface& space, int f, double u0, double u1, double u2);

/// max over incident mesh edges of |u(x) - u(y)| / len(x, y).
double pointwise_lip(const ConeSurface& space, const PLFunction& u, int x);
/// Same over the arcs of a Steiner graph, for node-valued fields.
double pointwise_lip(const SteinerGraph& graph, const std::vector<double>& node_values, int node);

/// Cotan stiffness and lumped masses.
struct DirichletOperator {
  const ConeSurface* host = nullptr;
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
  std::vector<char> boundary;
  /// Smallest cotan edge weight (negative on obtuse pairs).
  double min_weight = 0.0;
};

DirichletOperator assemble_dirichlet(const ConeSurface& space);

double dirichlet_form(const DirichletOperator& op, const PLFunction& u, const PLFunction& v);
/// L_u(phi) = -E(u, phi); phi must vanish on the boundary.
double laplacian_functional(const DirichletOperator& op, const PLFunction& u,
                            const PLFunction& phi);
/// L_u tested against every hat at once: entry v is L_u(hat_v).
Eigen::VectorXd laplacian_on_hats(const DirichletOperator& op, const PLFunction& u);
/// Lumped integral of f * phi.
double lumped_integral(const DirichletOperator& op, const PLFunction& f, const PLFunction& phi);

/// Hat function at an interior vertex of a region: every neighbour lies in the
/// region and the centre is not on the mesh boundary, so the support stays
/// inside the open region.
struct Hat {
  int center = -1;
};

std::vector<Hat> hat_functions(const ConeSurface& space, const std::function<bool(int)>& region);
PLFunction hat_to_pl(const ConeSurface& space, const Hat& hat);

/// Integral of a PL function over {|d - r| <= eps} divided by 2 eps, where d
/// is the PL interpolant of the field's vertex distances. Faces are clipped
/// exactly.
double shell_integral(const DistanceField& field, const PLFunction& u, double r, double eps);
/// Integral of u over the sublevel set {d <= r}, with exact clipping.
double ball_integral(const DistanceField& field, const PLFunction& u, double r);
double ball_volume(const DistanceField& field, double r);

/// Radial profile phi with its derivative.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Compares I_{w,A}(v) with phi'(R) S_R(v) - phi'(r) S_r(v) on A = {r <= d <= R},
/// w = phi(d). Shells use eps = 2 h.
ExperimentReport green_identity_check(const ConeSurface& space, const DirichletOperator& op,
                                      const DistanceField& field, double r, double R,
                                      const PLFunction& v, const RadialProfile& phi, double h);

}  // namespace alexlab
