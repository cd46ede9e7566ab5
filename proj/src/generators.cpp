#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "alexlab/error.hpp"
#include "alexlab/surface.hpp"

namespace alexlab {

namespace {

constexpr double kPi = std::numbers::pi;

struct Polar {
  double rho;
  double alpha;
};

// Ring/sector layout shared by flat and cone disks. Inner rings form a regular
// lattice in each of six sectors; outer rings are blended onto circles.
ConeSurface sector_disk(double theta, double R, double h) {
  if (!(R > 0 && h > 0)) fail(ErrorCode::Domain, "disk generator needs R > 0 and h > 0");
  if (!(theta > 0 && theta <= 4 * kPi + 1e-12))
    fail(ErrorCode::Domain, "cone angle must lie in (0, 4 pi]");
  const int n = std::max(2, static_cast<int>(std::ceil(R / h - 1e-9)));
  const double step = R / n;
  const double w = theta / 6.0;
  const int i0 = n / 2;

  auto ring_start = [](int i) { return i == 0 ? 0 : 1 + 3 * i * (i - 1); };
  auto index = [&](int i, int s, int j) {
    if (i == 0) return 0;
    int g = (s * i + j) % (6 * i);
    return ring_start(i) + g;
  };

  std::vector<Polar> polar(ring_start(n + 1));
  polar[0] = {0.0, 0.0};
  for (int i = 1; i <= n; ++i) {
    double x = i <= i0 ? 0.0 : static_cast<double>(i - i0) / (n - i0);
    double beta = x * x * (3.0 - 2.0 * x);
    for (int s = 0; s < 6; ++s) {
      for (int j = 0; j < i; ++j) {
        double tau = static_cast<double>(j) / i;
        Vec2 hex = i * step * ((1.0 - tau) * Vec2(1, 0) + tau * Vec2(std::cos(w), std::sin(w)));
        Vec2 circ = i * step * Vec2(std::cos(tau * w), std::sin(tau * w));
        Vec2 p = (1.0 - beta) * hex + beta * circ;
        polar[index(i, s, j)] = {p.norm(), s * w + std::atan2(p.y(), p.x())};
      }
    }
  }

  std::vector<std::array<int, 3>> faces;
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < 6; ++s) {
      for (int j = 0; j <= i; ++j)
        faces.push_back({index(i, s, j), index(i + 1, s, j), index(i + 1, s, j + 1)});
      for (int j = 0; j < i; ++j)
        faces.push_back({index(i, s, j), index(i + 1, s, j + 1), index(i, s, j + 1)});
    }
  }

  auto length = [&](int a, int b) {
    const Polar& p = polar[a];
    const Polar& q = polar[b];
    double d = std::remainder(q.alpha - p.alpha, theta);
    double sq = p.rho * p.rho + q.rho * q.rho - 2.0 * p.rho * q.rho * std::cos(d);
    return std::sqrt(std::max(sq, 0.0));
  };

  std::vector<Vec3> pos(polar.size());
  const double wrap = 2.0 * kPi / theta;
  const double rim = theta <= 2 * kPi ? theta / (2 * kPi) : 1.0;
  const double drop = theta < 2 * kPi ? std::sqrt(1.0 - rim * rim) : 0.0;
  for (std::size_t v = 0; v < polar.size(); ++v) {
    double b = polar[v].alpha * wrap;
    double r = polar[v].rho * rim;
    pos[v] = Vec3(r * std::cos(b), r * std::sin(b), -polar[v].rho * drop);
  }
  return build_surface_from(faces, length, 0.0, std::move(pos));
}

}  // namespace

// Equilateral lattice through the origin, clipped to the triangles whose
// centroid lies inside the circle. Every interior vertex keeps a regular star.
ConeSurface flat_disk(double R, double h) {
  if (!(R > 0 && h > 0)) fail(ErrorCode::Domain, "flat_disk needs R > 0 and h > 0");
  const int n = std::max(2, static_cast<int>(std::ceil(R / h - 1e-9)));
  const double step = R / n;
  // Lattice point (a, b) = a e1 + b e2, |(a, b)|^2 = a^2 + ab + b^2 in units of step^2.
  // An up triangle at (a, b) has centroid (a + 1/3, b + 1/3), a down one (a + 2/3, b + 2/3).
  // 9 |c|^2 is an integer. The cut-off is the integer nearest 9 n^2 whose
  // triangle count best matches the disk area; it is symmetric under the lattice rotations.
  auto norm9 = [](long a3, long b3) { return a3 * a3 + a3 * b3 + b3 * b3; };
  const int span = 2 * n + 2;
  std::vector<long> norms;
  for (int a = -span; a <= span; ++a)
    for (int b = -span; b <= span; ++b) {
      norms.push_back(norm9(3L * a + 1, 3L * b + 1));
      norms.push_back(norm9(3L * a + 2, 3L * b + 2));
    }
  std::sort(norms.begin(), norms.end());
  const double target = kPi * R * R / (std::sqrt(3.0) / 4.0 * step * step);
  long cut = 9L * n * n;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < norms.size(); ++i) {
    // including every norm up to norms[i]
    if (i + 1 < norms.size() && norms[i + 1] == norms[i]) continue;
    if (norms[i] > 12L * n * n) break;
    double err = std::abs(static_cast<double>(i + 1) - target);
    if (err < best) best = err, cut = norms[i] + 1;
  }
  auto inside = [&](long a3, long b3) { return norm9(a3, b3) < cut; };
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::array<std::pair<int, int>, 3>> tris;
  for (int a = -span; a <= span; ++a) {
    for (int b = -span; b <= span; ++b) {
      if (inside(3L * a + 1, 3L * b + 1)) tris.push_back({{{a, b}, {a + 1, b}, {a, b + 1}}});
      if (inside(3L * a + 2, 3L * b + 2))
        tris.push_back({{{a + 1, b}, {a + 1, b + 1}, {a, b + 1}}});
    }
  }
  // vertex order: by lattice norm, then by angle, so the centre is vertex 0
  std::vector<std::pair<int, int>> verts;
  for (const auto& t : tris)
    for (const auto& v : t) ids.emplace(v, 0);
  for (const auto& kv : ids) verts.push_back(kv.first);
  auto pos2 = [&](const std::pair<int, int>& v) {
    return Vec2(step * (v.first + 0.5 * v.second), step * (std::sqrt(3.0) / 2.0) * v.second);
  };
  auto angle = [&](const std::pair<int, int>& v) {
    Vec2 p = pos2(v);
    double a = std::atan2(p.y(), p.x());
    return a < 0 ? a + 2 * kPi : a;
  };
  std::sort(verts.begin(), verts.end(), [&](const auto& x, const auto& y) {
    long nx = 1L * x.first * x.first + 1L * x.first * x.second + 1L * x.second * x.second;
    long ny = 1L * y.first * y.first + 1L * y.first * y.second + 1L * y.second * y.second;
    if (nx != ny) return nx < ny;
    return angle(x) < angle(y);
  });
  std::vector<Vec3> pos;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    ids[verts[i]] = static_cast<int>(i);
    Vec2 p = pos2(verts[i]);
    pos.emplace_back(p.x(), p.y(), 0.0);
  }
  std::vector<std::array<int, 3>> faces;
  for (const auto& t : tris) faces.push_back({ids[t[0]], ids[t[1]], ids[t[2]]});
  auto length = [&](int a, int b) { return (pos[a] - pos[b]).norm(); };
  return build_surface_from(faces, length, 0.0, pos);
}

ConeSurface cone_disk(double theta, double R, double h) { return sector_disk(theta, R, h); }

ConeSurface flat_torus(double L, double h) {
  if (!(L > 0 && h > 0)) fail(ErrorCode::Domain, "flat_torus needs L > 0 and h > 0");
  const int n = std::max(3, static_cast<int>(std::ceil(L / h - 1e-9)));
  const double step = L / n;
  auto id = [n](int i, int j) { return ((i % n + n) % n) + n * ((j % n + n) % n); };
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> pos(n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      pos[id(i, j)] = Vec3(i * step, j * step, 0.0);
      faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  auto length = [&](int a, int b) {
    int di = std::abs(a % n - b % n), dj = std::abs(a / n - b / n);
    di = std::min(di, n - di);
    dj = std::min(dj, n - dj);
    return step * std::sqrt(static_cast<double>(di * di + dj * dj));
  };
  return build_surface_from(faces, length, 0.0, std::move(pos));
}

ConeSurface icosphere(int subdivisions) {
  if (subdivisions < 0) fail(ErrorCode::Domain, "icosphere needs subdivisions >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pos = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                           {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                           {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : pos) p.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      pos.push_back((pos[a] + pos[b]).normalized());
      int id = static_cast<int>(pos.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces.swap(next);
  }
  auto length = [&](int a, int b) {
    double chord = (pos[a] - pos[b]).norm();
    return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
  };
  return build_surface_from(faces, length, 1.0, pos);
}

}  // namespace alexlab
