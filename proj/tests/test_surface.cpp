#include <cmath>
#include <numbers>

#include "alexlab/error.hpp"
#include "alexlab/surface.hpp"
#include "doctest.h"

using namespace alexlab;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Config;  // sentinel: nothing thrown
}

double gauss_bonnet_defect(const ConeSurface& s) {
  double sum = 0;
  for (int v = 0; v < s.vertex_count(); ++v) sum += 2 * pi - s.cone_angle(v);
  return sum;
}

}  // namespace

TEST_CASE("unit square from two faces") {
  std::vector<std::array<int, 3>> faces{{0, 1, 2}, {0, 2, 3}};
  std::vector<std::array<double, 3>> lens{{1, 1, std::sqrt(2.0)}, {std::sqrt(2.0), 1, 1}};
  ConeSurface s = build_surface(faces, lens, 0.0);
  CHECK(s.vertex_count() == 4);
  CHECK(s.edge_count() == 5);
  CHECK(s.total_area() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.cone_angle(0) == doctest::Approx(pi / 2));
  CHECK(s.cone_angle(1) == doctest::Approx(pi / 2));
  for (int v = 0; v < 4; ++v) CHECK(s.is_boundary(v));
  CHECK(s.singular_vertices().empty());
  CHECK(s.certified());
}

TEST_CASE("ingestion errors") {
  CHECK(code_of([] { build_surface({{0, 1, 2}}, {{1, 1, 3}}, 0.0); }) ==
        ErrorCode::TriangleInequality);
  CHECK(code_of([] {
          build_surface({{0, 1, 2}, {0, 2, 3}}, {{1, 1, 1.4}, {1.5, 1, 1}}, 0.0);
        }) == ErrorCode::InconsistentGluing);
  CHECK(code_of([] { build_surface({{0, 1, 2}, {3, 4, 5}}, {{1, 1, 1}, {1, 1, 1}}, 0.0); }) ==
        ErrorCode::Disconnected);
  CHECK(code_of([] { build_surface({{0, 1, 2}}, {{1, -1, 1}}, 0.0); }) == ErrorCode::Malformed);
}

TEST_CASE("flat disk generator") {
  ConeSurface s = flat_disk(1.0, 0.1);
  CHECK(std::abs(s.total_area() - pi) < 0.02 * pi);
  CHECK(s.singular_vertices().empty());
  CHECK(s.certified());
  for (int v = 0; v < s.vertex_count(); ++v)
    if (!s.is_boundary(v)) CHECK(std::abs(s.cone_angle(v) - 2 * pi) < 1e-9);
  // well shaped: no obtuse corners, so every cotan weight is nonnegative
  double worst = 0;
  for (int f = 0; f < s.face_count(); ++f)
    for (int i = 0; i < 3; ++i) worst = std::max(worst, s.corner_angle(f, i));
  CHECK(worst < pi / 2);
  // centre at the origin, a vertex on the positive x axis at the rim
  CHECK(s.position(0).norm() < 1e-15);
  CHECK((s.position(nearest_vertex(s, Vec3(1, 0, 0))) - Vec3(1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("cone disk generator") {
  ConeSurface s = cone_disk(1.5 * pi, 1.0, 0.05);
  CHECK(std::abs(s.cone_angle(0) - 1.5 * pi) < 1e-9);
  CHECK(std::abs(s.total_area() - 0.75 * pi) < 0.02 * 0.75 * pi);
  REQUIRE(s.singular_vertices().size() == 1);
  CHECK(s.singular_vertices()[0] == 0);
  CHECK(s.certified());

  ConeSurface saddle = cone_disk(3 * pi, 1.0, 0.1);
  CHECK(std::abs(saddle.cone_angle(0) - 3 * pi) < 1e-9);
  CHECK_FALSE(saddle.certified());

  ConeSurface flat = cone_disk(2 * pi, 1.0, 0.1);
  CHECK(flat.singular_vertices().empty());
}

TEST_CASE("cone disk survives an OFF round trip") {
  ConeSurface s = cone_disk(1.5 * pi, 1.0, 0.1);
  ConeSurface t = parse_off(format_off(s));
  REQUIRE(t.vertex_count() == s.vertex_count());
  CHECK(std::abs(t.cone_angle(0) - 1.5 * pi) < 1e-9);
  REQUIRE(t.singular_vertices().size() == 1);
  CHECK(t.singular_vertices()[0] == 0);
  for (int e = 0; e < s.edge_count(); ++e)
    CHECK(std::abs(s.edge(e).length - t.edge(e).length) < 1e-12);
}

TEST_CASE("flat torus and icosphere") {
  ConeSurface torus = flat_torus(1.0, 0.1);
  CHECK_FALSE(torus.has_boundary());
  CHECK(torus.singular_vertices().empty());
  CHECK(torus.euler_characteristic() == 0);
  CHECK(std::abs(torus.total_area() - 1.0) < 1e-12);
  CHECK(std::abs(gauss_bonnet_defect(torus)) < 1e-8);

  ConeSurface sphere = icosphere(3);
  CHECK(sphere.vertex_count() == 642);
  CHECK(std::abs(sphere.total_area() - 4 * pi) < 0.01 * 4 * pi);
  CHECK(sphere.euler_characteristic() == 2);
  CHECK(std::abs(gauss_bonnet_defect(sphere) - 4 * pi) < 1e-8);
  CHECK(sphere.declared_k() == 1.0);
  CHECK_FALSE(sphere.certified());

  ConeSurface cone = cone_disk(1.5 * pi, 1.0, 0.1);
  CHECK(std::abs(gauss_bonnet_defect(cone) - 2 * pi * cone.euler_characteristic()) > 1.0);
}

TEST_CASE("OFF parsing") {
  const std::string base = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
  ConeSurface s = parse_off(base);
  CHECK(s.total_area() == doctest::Approx(0.5));
  ConeSurface t = parse_off(base + "#lengths\n0 1 1.2\n");
  CHECK(t.edge(t.find_edge(0, 1)).length == doctest::Approx(1.2));
  CHECK(code_of([&] { parse_off(base + "#lengths\n0 1 nan\n"); }) == ErrorCode::Malformed);
  CHECK(code_of([&] { parse_off(base + "#lengths\n0 1 -2\n"); }) == ErrorCode::Malformed);
  CHECK(code_of([&] { parse_off(base + "#lengths\n0 1 0\n"); }) == ErrorCode::Malformed);
  CHECK(code_of([&] { parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n"); }) == ErrorCode::Malformed);
  CHECK(code_of([&] { parse_off("PLY\n"); }) == ErrorCode::Malformed);
  try {
    parse_off(base + "#lengths\n0 1 -2\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 8") != std::string::npos);
  }
}
