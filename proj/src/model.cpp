#include "alexlab/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "alexlab/error.hpp"

namespace alexlab {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_flat(double k) { return std::abs(k) < kFlatCurvature; }

void check_dimension(const ModelParams& params) {
  if (params.n < 2) fail(ErrorCode::Domain, "model dimension must be >= 2");
  if (!std::isfinite(params.k)) fail(ErrorCode::Domain, "model curvature must be finite");
}

// Upper end of the n = 2 (and k > 0) kernel integral.
double kernel_cutoff(double k) { return k > 0 ? kPi / (2.0 * std::sqrt(k)) : 1.0; }

double power_integral(const ModelParams& p, double a, double b) {
  return integrate([&](double t) { return std::pow(generalized_sine(p.k, t), 1 - p.n); }, a, b);
}

}  // namespace

double unit_sphere_volume(int m) {
  // 2 pi^{(m+1)/2} / Gamma((m+1)/2)
  double h = 0.5 * (m + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

double generalized_sine(double k, double t) {
  if (is_flat(k)) return t;
  if (k > 0) {
    double s = std::sqrt(k);
    return std::sin(s * t) / s;
  }
  double s = std::sqrt(-k);
  return std::sinh(s * t) / s;
}

double generalized_cosine(double k, double t) {
  if (is_flat(k)) return 1.0;
  if (k > 0) return std::cos(std::sqrt(k) * t);
  return std::cosh(std::sqrt(-k) * t);
}

double green_kernel(const ModelParams& params, double r) {
  check_dimension(params);
  if (!(r > 0)) fail(ErrorCode::Domain, "green_kernel: r must be positive");
  const double k = params.k;
  if (k > 0 && !is_flat(k) && r >= kPi / std::sqrt(k))
    fail(ErrorCode::Domain, "green_kernel: r beyond the model diameter");
  const int n = params.n;
  if (n == 2) {
    if (is_flat(k)) return -std::log(r) / (2.0 * kPi);
    double s = std::sqrt(std::abs(k));
    // Antiderivative of 1/s_k is log tan(s t / 2) resp. log tanh(s t / 2).
    auto prim = [&](double t) {
      return k > 0 ? std::log(std::tan(0.5 * s * t)) : std::log(std::tanh(0.5 * s * t));
    };
    return (prim(kernel_cutoff(k)) - prim(r)) / (2.0 * kPi);
  }
  const double scale = 1.0 / ((n - 2) * unit_sphere_volume(n - 1));
  if (is_flat(k)) return scale * std::pow(r, 2 - n);
  if (k > 0) return scale * power_integral(params, r, kernel_cutoff(k));
  // k < 0: integrate in unit chunks until the exponential tail is negligible.
  const double a = std::sqrt(-k);
  double sum = 0.0, lo = r;
  for (int i = 0; i < 10000; ++i) {
    double hi = lo + 1.0 / a;
    double piece = power_integral(params, lo, hi);
    sum += piece;
    lo = hi;
    if (piece < 1e-13 * sum) break;
  }
  // tail of (2a)^{n-1} e^{-(n-1) a t}
  sum += std::pow(2.0 * a, n - 1) * std::exp(-(n - 1) * a * lo) / ((n - 1) * a);
  return scale * sum;
}

double green_kernel_derivative(const ModelParams& params, double r) {
  check_dimension(params);
  if (!(r > 0)) fail(ErrorCode::Domain, "green_kernel_derivative: r must be positive");
  const double factor = params.n == 2 ? 1.0 : params.n - 2.0;
  return -1.0 / (factor * unit_sphere_volume(params.n - 1) *
                 std::pow(generalized_sine(params.k, r), params.n - 1));
}

double model_sphere_area(const ModelParams& params, double r) {
  check_dimension(params);
  if (r < 0) fail(ErrorCode::Domain, "model_sphere_area: negative radius");
  if (params.k > 0 && !is_flat(params.k) && r > kPi / std::sqrt(params.k) * (1 + 1e-12))
    fail(ErrorCode::Domain, "model_sphere_area: radius exceeds model diameter");
  return unit_sphere_volume(params.n - 1) * std::pow(generalized_sine(params.k, r), params.n - 1);
}

double model_ball_volume(const ModelParams& params, double r) {
  check_dimension(params);
  if (r < 0) fail(ErrorCode::Domain, "model_ball_volume: negative radius");
  const double k = params.k;
  if (k > 0 && !is_flat(k) && r > kPi / std::sqrt(k) * (1 + 1e-12))
    fail(ErrorCode::Domain, "model_ball_volume: radius exceeds model diameter");
  const int n = params.n;
  const double omega = unit_sphere_volume(n - 1);
  if (is_flat(k)) return omega * std::pow(r, n) / n;
  if (n == 2) {
    if (k > 0) return 2.0 * kPi * (1.0 - std::cos(std::sqrt(k) * r)) / k;
    return 2.0 * kPi * (std::cosh(std::sqrt(-k) * r) - 1.0) / (-k);
  }
  if (r == 0) return 0.0;
  return omega * integrate([&](double t) { return std::pow(generalized_sine(k, t), n - 1); }, 0.0, r);
}

double cone_ball_volume(double direction_measure, const ModelParams& params, double r) {
  if (!(direction_measure > 0))
    fail(ErrorCode::Domain, "cone_ball_volume: direction measure must be positive");
  return direction_measure / unit_sphere_volume(params.n - 1) * model_ball_volume(params, r);
}

double comparison_angle(double k, double opp, double s1, double s2) {
  if (!(s1 > 0 && s2 > 0) || !(opp >= 0))
    fail(ErrorCode::Domain, "comparison_angle: sides must be positive");
  const double scale = opp + s1 + s2;
  const double slack = 1e-12 * scale;
  if (opp > s1 + s2 + slack || s1 > opp + s2 + slack || s2 > opp + s1 + slack)
    fail(ErrorCode::TriangleInequality, "comparison_angle: lengths violate the triangle inequality");
  double c;
  if (is_flat(k)) {
    c = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
  } else if (k > 0) {
    const double q = std::sqrt(k);
    if (q * scale >= 2.0 * kPi)
      fail(ErrorCode::PerimeterTooLarge, "comparison_angle: perimeter >= 2 pi / sqrt(k)");
    double a = q * s1, b = q * s2, cc = q * opp;
    c = (std::cos(cc) - std::cos(a) * std::cos(b)) / (std::sin(a) * std::sin(b));
  } else {
    const double q = std::sqrt(-k);
    double a = q * s1, b = q * s2, cc = q * opp;
    c = (std::cosh(a) * std::cosh(b) - std::cosh(cc)) / (std::sinh(a) * std::sinh(b));
  }
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c);
}

BishopGromovProfile bishop_gromov_profile(const std::vector<std::pair<double, double>>& ball_volumes,
                                          const ModelParams& params, double tol) {
  if (ball_volumes.empty()) fail(ErrorCode::Domain, "bishop_gromov_profile: empty input");
  BishopGromovProfile out;
  for (std::size_t i = 0; i < ball_volumes.size(); ++i) {
    auto [r, vol] = ball_volumes[i];
    if (!(r > 0)) fail(ErrorCode::Domain, "bishop_gromov_profile: radii must be positive");
    if (vol < 0) fail(ErrorCode::Domain, "bishop_gromov_profile: negative volume");
    if (i > 0 && !(r > ball_volumes[i - 1].first))
      fail(ErrorCode::Domain, "bishop_gromov_profile: radii must increase");
    if (i > 0 && vol < ball_volumes[i - 1].second)
      fail(ErrorCode::Domain, "bishop_gromov_profile: volumes must not decrease");
    out.radii.push_back(r);
    out.ratios.push_back(vol / model_ball_volume(params, r));
    if (i > 0 && out.ratios[i] > out.ratios[i - 1] + tol) out.monotone = false;
  }
  return out;
}

}  // namespace alexlab
