#include <array>
#include <cmath>
#include <numbers>

#include "alexlab/error.hpp"
#include "alexlab/model.hpp"
#include "doctest.h"

using namespace alexlab;
using std::numbers::pi;

TEST_CASE("generalized sine branches") {
  CHECK(generalized_sine(0.0, 2.5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(generalized_sine(1.0, pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  // long double oracle
  double oracle = static_cast<double>(std::sinh(1.0L));
  CHECK(std::abs(generalized_sine(-1.0, 1.0) - oracle) < 1e-15);
  CHECK(std::abs(generalized_sine(-1.0, 1.0) - 1.1752011936438014) < 1e-15);
}

TEST_CASE("generalized sine is continuous across k = 0") {
  for (double t : {0.1, 1.0, 3.0}) {
    CHECK(std::abs(generalized_sine(1e-8, t) - t) < 1e-6);
    CHECK(std::abs(generalized_sine(-1e-8, t) - t) < 1e-6);
  }
}

TEST_CASE("green kernel closed forms") {
  CHECK(std::abs(green_kernel({3, 0.0}, 1.0) - 1.0 / (4 * pi)) < 1e-14);
  CHECK(std::abs(green_kernel({2, 0.0}, 1.0)) < 1e-15);
  for (int n : {3, 4, 5})
    for (double r : {0.3, 1.0, 2.7}) {
      double closed = std::pow(r, 2 - n) / ((n - 2) * unit_sphere_volume(n - 1));
      CHECK(std::abs(green_kernel({n, 0.0}, r) - closed) <= 1e-10 * closed);
    }
  // n = 3, k = -1: (coth r - 1) / 4 pi
  for (double r : {0.2, 1.0, 3.0}) {
    double closed = (1.0 / std::tanh(r) - 1.0) / (4 * pi);
    CHECK(std::abs(green_kernel({3, -1.0}, r) - closed) <= 1e-9 * closed);
  }
  // n = 3, k = 1 with cutoff pi/2: cot r / 4 pi
  for (double r : {0.2, 0.7, 1.2}) {
    double closed = 1.0 / std::tan(r) / (4 * pi);
    CHECK(std::abs(green_kernel({3, 1.0}, r) - closed) <= 1e-9 * closed);
  }
}

TEST_CASE("green kernel derivative matches finite differences") {
  for (ModelParams p : {ModelParams{2, 0.0}, ModelParams{2, 1.0}, ModelParams{2, -1.0},
                        ModelParams{3, -0.5}, ModelParams{4, 0.8}}) {
    for (double r : {0.3, 0.9}) {
      double eps = 1e-5;
      double fd = (green_kernel(p, r + eps) - green_kernel(p, r - eps)) / (2 * eps);
      CHECK(std::abs(fd - green_kernel_derivative(p, r)) < 1e-6 * std::abs(fd) + 1e-9);
    }
  }
}

TEST_CASE("green kernel decreases for k <= 0 and rejects r <= 0") {
  for (ModelParams p : {ModelParams{2, 0.0}, ModelParams{2, -1.0}, ModelParams{3, -2.0}}) {
    double prev = green_kernel(p, 0.05);
    for (double r = 0.1; r < 3.0; r += 0.1) {
      double cur = green_kernel(p, r);
      CHECK(cur < prev);
      prev = cur;
    }
  }
  CHECK_THROWS_AS(green_kernel({2, 0.0}, 0.0), Error);
  CHECK_THROWS_AS(green_kernel({2, 0.0}, -1.0), Error);
}

TEST_CASE("model volumes") {
  CHECK(model_sphere_area({2, 0.0}, 1.0) == doctest::Approx(2 * pi));
  CHECK(model_ball_volume({2, 0.0}, 1.0) == doctest::Approx(pi));
  CHECK(model_ball_volume({2, 1.0}, pi) == doctest::Approx(4 * pi));
  CHECK(model_ball_volume({3, 0.0}, 2.0) == doctest::Approx(32 * pi / 3));
  // S^3 of curvature 1 has volume 2 pi^2
  CHECK(model_ball_volume({3, 1.0}, pi) == doctest::Approx(2 * pi * pi).epsilon(1e-9));
  CHECK_THROWS_AS(model_ball_volume({2, 1.0}, 4.0), Error);
}

TEST_CASE("ball volume derivative is the sphere area") {
  for (ModelParams p : {ModelParams{2, 0.0}, ModelParams{2, 1.0}, ModelParams{2, -1.0},
                        ModelParams{3, -1.0}, ModelParams{3, 0.5}}) {
    for (double r : {0.4, 1.3}) {
      double eps = 1e-5;
      double fd = (model_ball_volume(p, r + eps) - model_ball_volume(p, r - eps)) / (2 * eps);
      double area = model_sphere_area(p, r);
      CHECK(std::abs(fd - area) < 1e-6 * area);
    }
  }
}

TEST_CASE("cone ball volume") {
  CHECK(cone_ball_volume(1.5 * pi, {2, 0.0}, 1.0) == doctest::Approx(0.75 * pi));
  CHECK(cone_ball_volume(2 * pi, {2, 0.0}, 0.7) == doctest::Approx(pi * 0.49));
  CHECK(cone_ball_volume(pi, {2, 0.0}, 2.0) == doctest::Approx(2 * pi));
  CHECK_THROWS_AS(cone_ball_volume(0.0, {2, 0.0}, 1.0), Error);
}

TEST_CASE("comparison angles") {
  CHECK(comparison_angle(0, 1, 1, 1) == doctest::Approx(pi / 3).epsilon(1e-14));
  CHECK(comparison_angle(0, 2, 1, 1) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(comparison_angle(1, pi / 2, pi / 2, pi / 2) == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK_THROWS_AS(comparison_angle(0, 3, 1, 1), Error);
  try {
    comparison_angle(1.0, 2.0, 2.2, 2.2);
    FAIL("expected PerimeterTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PerimeterTooLarge);
  }
  // planar law of cosines
  for (double g : {0.3, 1.0, 2.0, 3.0}) {
    double a = 1.3, b = 0.7;
    double c = std::sqrt(a * a + b * b - 2 * a * b * std::cos(g));
    CHECK(std::abs(comparison_angle(0, c, a, b) - g) < 1e-12);
  }
  // spherical triangles have angle sum >= pi
  for (auto [a, b, c] : {std::array<double, 3>{0.5, 0.6, 0.7}, {1.0, 1.2, 0.4},
                         {2.0, 1.5, 1.0}, {0.1, 0.1, 0.15}}) {
    double sum = comparison_angle(1, a, b, c) + comparison_angle(1, b, c, a) +
                 comparison_angle(1, c, a, b);
    CHECK(sum >= pi - 1e-12);
  }
}

TEST_CASE("bishop-gromov profiles") {
  std::vector<std::pair<double, double>> plane, cone, bad;
  for (double r = 0.1; r < 1.0; r += 0.1) {
    plane.push_back({r, pi * r * r});
    cone.push_back({r, 0.75 * pi * r * r});
    bad.push_back({r, pi * r * r * (1 + r)});
  }
  auto p = bishop_gromov_profile(plane, {2, 0.0});
  CHECK(p.monotone);
  for (double x : p.ratios) CHECK(x == doctest::Approx(1.0));
  auto c = bishop_gromov_profile(cone, {2, 0.0});
  CHECK(c.monotone);
  for (double x : c.ratios) CHECK(x == doctest::Approx(0.75));
  CHECK_FALSE(bishop_gromov_profile(bad, {2, 0.0}).monotone);
  CHECK_THROWS_AS(bishop_gromov_profile({}, {2, 0.0}), Error);
}
