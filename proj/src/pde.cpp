#include "alexlab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "alexlab/error.hpp"

namespace alexlab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Principal submatrix on the vertices listed in `keep` (index map gives the row).
SpMat restrict_matrix(const SpMat& A, const std::vector<int>& keep, const std::vector<int>& index) {
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    int col = keep[r];
    for (SpMat::InnerIterator it(A, col); it; ++it) {
      int j = index[it.row()];
      if (j >= 0) trip.emplace_back(j, static_cast<int>(r), it.value());
    }
  }
  SpMat out(static_cast<int>(keep.size()), static_cast<int>(keep.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

int iteration_cap(const SolverOptions& opts, int n) {
  return std::max(50, static_cast<int>(opts.iteration_factor * std::sqrt(static_cast<double>(n))));
}

}  // namespace

CGResult conjugate_gradient(const SpMat& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            double tol, int max_iter, const Eigen::VectorXd* project_mass,
                            double abs_tol) {
  const int n = static_cast<int>(b.size());
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);
  auto project = [&](Eigen::VectorXd& v) {
    if (project_mass) v.array() -= project_mass->dot(v) / project_mass->sum();
  };
  project(x);
  Eigen::VectorXd inv_diag = A.diagonal().cwiseInverse();
  Eigen::VectorXd r = b - A * x;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z, Ap(n);
  double rz = r.dot(z);
  const double target = std::max(tol * b.norm(), abs_tol);
  CGResult res;
  res.residual = r.norm();
  while (res.residual > target) {
    if (res.iterations >= max_iter)
      fail(ErrorCode::SolverDiverged, "conjugate gradients hit the iteration cap (" +
                                          std::to_string(max_iter) + ")");
    Ap.noalias() = A * p;
    double pap = p.dot(Ap);
    if (!(pap > 0)) break;
    double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * Ap;
    z = inv_diag.cwiseProduct(r);
    double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    res.residual = r.norm();
    ++res.iterations;
  }
  project(x);
  return res;
}

PLFunction solve_dirichlet(const DirichletOperator& op, const PLFunction& f, const PLFunction& g,
                           const std::vector<char>& fixed_in, const SolverOptions& opts) {
  const int nv = static_cast<int>(op.mass.size());
  if (f.size() != nv || g.size() != nv || f.host != op.host || g.host != op.host)
    fail(ErrorCode::HostMismatch, "data and operator have different hosts");
  if (!(opts.tol > 0)) fail(ErrorCode::Domain, "solver tolerance must be positive");
  const std::vector<char>& fixed = fixed_in.empty() ? op.boundary : fixed_in;
  std::vector<int> free, index(nv, -1);
  for (int v = 0; v < nv; ++v)
    if (!fixed[v]) {
      index[v] = static_cast<int>(free.size());
      free.push_back(v);
    }
  if (static_cast<int>(free.size()) == nv) fail(ErrorCode::EmptyBoundary, "no Dirichlet vertices");
  PLFunction u = g;
  if (free.empty()) return u;
  SpMat A = restrict_matrix(op.stiffness, free, index);
  Eigen::VectorXd b(free.size());
  for (std::size_t r = 0; r < free.size(); ++r) b[r] = -op.mass[free[r]] * f[free[r]];
  for (int col = 0; col < nv; ++col) {
    if (!fixed[col] || g[col] == 0.0) continue;
    for (SpMat::InnerIterator it(op.stiffness, col); it; ++it) {
      int r = index[it.row()];
      if (r >= 0) b[r] -= it.value() * g[col];
    }
  }
  // start from the mean of the fixed data, so constant data is reproduced exactly
  double mean = 0.0;
  for (int v = 0; v < nv; ++v)
    if (fixed[v]) mean += g[v];
  mean /= static_cast<double>(nv - free.size());
  Eigen::VectorXd x = Eigen::VectorXd::Constant(free.size(), mean);
  conjugate_gradient(A, b, x, opts.tol, iteration_cap(opts, static_cast<int>(free.size())));
  for (std::size_t r = 0; r < free.size(); ++r) u.values[free[r]] = x[r];
  return u;
}

PLFunction solve_poisson_dirichlet(const ConeSurface& space, const DirichletOperator& op,
                                   const PLFunction& f, const PLFunction& g, double tol) {
  if (op.host != &space) fail(ErrorCode::HostMismatch, "operator is not assembled on this surface");
  if (!space.has_boundary()) fail(ErrorCode::EmptyBoundary, "surface has no boundary");
  SolverOptions opts;
  opts.tol = tol;
  return solve_dirichlet(op, f, g, op.boundary, opts);
}

ExperimentReport check_maximum_principle(const ConeSurface& space, const PLFunction& u,
                                         const std::function<bool(int)>& region,
                                         PrincipleSide side, double tol) {
  if (u.host != &space) fail(ErrorCode::HostMismatch, "function is not hosted on this surface");
  const double sign = side == PrincipleSide::Sub ? 1.0 : -1.0;
  double bmax = -INFINITY, imax = -INFINITY, lo = INFINITY, hi = -INFINITY;
  int nb = 0, ni = 0;
  for (int v = 0; v < space.vertex_count(); ++v) {
    if (!region(v)) continue;
    bool on_boundary = space.is_boundary(v);
    for (int w : space.neighbors(v)) on_boundary = on_boundary || !region(w);
    double x = sign * u[v];
    lo = std::min(lo, u[v]);
    hi = std::max(hi, u[v]);
    if (on_boundary) {
      bmax = std::max(bmax, x);
      ++nb;
    } else {
      imax = std::max(imax, x);
      ++ni;
    }
  }
  if (nb == 0) fail(ErrorCode::EmptyBoundary, "region has no boundary vertices");
  ExperimentReport rep;
  rep.name = "maximum_principle";
  rep.params = {{"side", side == PrincipleSide::Sub ? "sub" : "super"}, {"tol", tol}};
  rep.set_budget(tol, 0.0, 0.0);
  rep.meta["boundary_extreme"] = sign * bmax;
  rep.meta["boundary_vertices"] = nb;
  rep.meta["interior_vertices"] = ni;
  if (ni > 0) {
    rep.meta["interior_extreme"] = sign * imax;
    rep.slacks.push_back(bmax - imax);
    bool attained = imax >= bmax - tol;
    bool constant = hi - lo <= tol;
    rep.meta["strong_form_triggered"] = attained;
    rep.meta["constant"] = constant;
    if (attained && !constant) rep.slacks.push_back(-(hi - lo));
  }
  rep.finalize();
  return rep;
}

double supersolution_slack(const DirichletOperator& op, const PLFunction& u, const PLFunction& f,
                           const std::vector<Hat>& hats) {
  if (hats.empty()) fail(ErrorCode::EmptyRegion, "no test functions");
  if (f.host != op.host) fail(ErrorCode::HostMismatch, "data and operator have different hosts");
  Eigen::VectorXd lu = laplacian_on_hats(op, u);
  double best = INFINITY;
  for (const Hat& h : hats)
    best = std::min(best, op.mass[h.center] * f[h.center] - lu[h.center]);
  return best;
}

Eigenpair first_nonzero_eigenpair(const ConeSurface& space, const DirichletOperator& op,
                                  double tol) {
  if (space.has_boundary()) fail(ErrorCode::NotClosed, "eigenpair needs a closed surface");
  if (op.host != &space) fail(ErrorCode::HostMismatch, "operator is not assembled on this surface");
  const int n = space.vertex_count();
  const Eigen::VectorXd& M = op.mass;
  double sigma = 1e-8 * op.stiffness.diagonal().sum() / M.sum();
  SpMat A = op.stiffness;
  for (int i = 0; i < n; ++i) A.coeffRef(i, i) += sigma * M[i];

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = gauss(rng);
  auto normalize = [&](Eigen::VectorXd& v) {
    v.array() -= M.dot(v) / M.sum();
    v /= std::sqrt(v.dot(M.cwiseProduct(v)));
  };
  normalize(x);
  Eigenpair out;
  Eigen::VectorXd y = x;
  const int cap = iteration_cap(SolverOptions{}, n);
  for (int it = 1; it <= 500; ++it) {
    Eigen::VectorXd rhs = M.cwiseProduct(x);
    conjugate_gradient(A, rhs, y, 1e-13, 4 * cap, &M);
    normalize(y);
    x = y;
    Eigen::VectorXd kx = op.stiffness * x;
    out.lambda = x.dot(kx);
    out.residual = (kx - out.lambda * M.cwiseProduct(x)).norm();
    out.iterations = it;
    if (out.residual <= tol) break;
  }
  if (out.residual > tol)
    fail(ErrorCode::SolverDiverged, "inverse iteration did not reach the residual tolerance");
  out.u = make_pl(space, std::vector<double>(x.data(), x.data() + n));
  return out;
}

std::vector<double> HarmonicMeasure::mu(const PLFunction& phi) const {
  std::vector<double> out;
  for (const auto& bw : boundary_weights) {
    double s = 0.0;
    for (auto [b, w] : bw) s += w * phi[b];
    out.push_back(s);
  }
  return out;
}

HarmonicMeasure harmonic_measure(const ConeSurface& space, const DirichletOperator& op,
                                 const DistanceField& field, double R, int m) {
  if (m < 8) fail(ErrorCode::Domain, "harmonic_measure needs m >= 8");
  if (!(R > 0)) fail(ErrorCode::Domain, "harmonic_measure needs R > 0");
  if (op.host != &space) fail(ErrorCode::HostMismatch, "operator is not assembled on this surface");
  HarmonicMeasure hm;
  hm.center = field.source;
  hm.R = R;
  hm.k = space.declared_k();
  const int nv = space.vertex_count();
  for (int v = 0; v < nv; ++v)
    if (field.at(v) <= R && space.is_boundary(v))
      fail(ErrorCode::BallTooLarge, "ball reaches the mesh boundary");
  for (int i = 1; i <= m; ++i) {
    double r = R * i / m;
    hm.radii.push_back(r);
    hm.weights.push_back(std::pow(generalized_sine(hm.k, r), hm.n - 1));
    std::vector<char> in(nv, 0);
    for (int v = 0; v < nv; ++v) in[v] = field.at(v) <= r;
    std::vector<int> interior, boundary, index(nv, -1);
    for (int v = 0; v < nv; ++v) {
      if (!in[v]) continue;
      bool edge = false;
      for (int w : space.neighbors(v)) edge = edge || !in[w];
      if (edge) {
        boundary.push_back(v);
      } else {
        index[v] = static_cast<int>(interior.size());
        interior.push_back(v);
      }
    }
    std::vector<std::pair<int, double>> bw;
    if (index[hm.center] < 0) {
      bw.push_back({hm.center, 1.0});
    } else {
      SpMat A = restrict_matrix(op.stiffness, interior, index);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(interior.size());
      e[index[hm.center]] = 1.0;
      Eigen::VectorXd y = Eigen::VectorXd::Zero(interior.size());
      conjugate_gradient(A, e, y, 1e-12,
                         iteration_cap(SolverOptions{}, static_cast<int>(interior.size())));
      for (int b : boundary) {
        double w = 0.0;
        for (SpMat::InnerIterator it(op.stiffness, b); it; ++it) {
          int j = index[it.row()];
          if (j >= 0) w -= it.value() * y[j];
        }
        if (w != 0.0) bw.push_back({b, w});
      }
    }
    hm.boundary_weights.push_back(std::move(bw));
  }
  return hm;
}

double hm_integrate(const HarmonicMeasure& hm, const PLFunction& phi) {
  std::vector<double> mu = hm.mu(phi);
  double num = 0.0, den = 0.0;
  double r_prev = 0.0, w_prev = 0.0, mu_prev = phi[hm.center];
  for (std::size_t i = 0; i < hm.radii.size(); ++i) {
    double dr = hm.radii[i] - r_prev;
    num += 0.5 * dr * (w_prev * mu_prev + hm.weights[i] * mu[i]);
    den += 0.5 * dr * (w_prev + hm.weights[i]);
    r_prev = hm.radii[i];
    w_prev = hm.weights[i];
    mu_prev = mu[i];
  }
  return num / den;
}

}  // namespace alexlab
