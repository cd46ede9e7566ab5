#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "alexlab/error.hpp"
#include "alexlab/surface.hpp"

namespace alexlab {

namespace {

[[noreturn]] void bad(int line, const std::string& msg) {
  fail(ErrorCode::Malformed, "line " + std::to_string(line) + ": " + msg);
}

}  // namespace

ConeSurface parse_off(const std::string& text, double declared_k) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool in_lengths = false;
  int stage = 0;  // 0 header, 1 counts, 2 vertices, 3 faces, 4 done
  int nv = 0, nf = 0;
  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> faces;
  std::map<std::pair<int, int>, std::pair<double, int>> overrides;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line[0] == '#') {
      if (line.rfind("#lengths", 0) == 0) {
        if (stage < 4 && !(stage == 3 && static_cast<int>(faces.size()) == nf))
          bad(line_no, "#lengths before the face list is complete");
        in_lengths = true;
        stage = 4;
      }
      continue;
    }
    std::istringstream ls(line);
    if (stage == 0) {
      if (line != "OFF") bad(line_no, "expected OFF header");
      stage = 1;
    } else if (stage == 1) {
      int ne = 0;
      if (!(ls >> nv >> nf >> ne) || nv <= 0 || nf <= 0) bad(line_no, "expected 'V F 0' counts");
      stage = 2;
    } else if (stage == 2) {
      double x, y, z;
      if (!(ls >> x >> y >> z)) bad(line_no, "expected three coordinates");
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        bad(line_no, "non-finite coordinate");
      pos.emplace_back(x, y, z);
      if (static_cast<int>(pos.size()) == nv) stage = 3;
    } else if (stage == 3) {
      int c, a, b, d;
      if (!(ls >> c >> a >> b >> d) || c != 3) bad(line_no, "expected '3 i j k'");
      for (int v : {a, b, d})
        if (v < 0 || v >= nv) bad(line_no, "vertex index out of range");
      faces.push_back({a, b, d});
      if (static_cast<int>(faces.size()) == nf) stage = 4;
    } else {
      if (!in_lengths) bad(line_no, "unexpected content after the face list");
      int a, b;
      std::string value;
      if (!(ls >> a >> b >> value)) bad(line_no, "expected 'i j L'");
      char* end = nullptr;
      double len = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0') bad(line_no, "unparsable length");
      if (!std::isfinite(len) || !(len > 0)) bad(line_no, "length must be finite and positive");
      overrides[std::minmax(a, b)] = {len, line_no};
    }
  }
  if (stage < 4) bad(line_no, "truncated file");

  std::map<std::pair<int, int>, bool> used;
  for (const auto& f : faces)
    for (int i = 0; i < 3; ++i) used[std::minmax(f[i], f[(i + 1) % 3])] = true;
  for (const auto& [key, val] : overrides)
    if (!used.count(key)) bad(val.second, "#lengths entry is not a mesh edge");

  auto length = [&](int a, int b) {
    auto it = overrides.find(std::minmax(a, b));
    if (it != overrides.end()) return it->second.first;
    return (pos[a] - pos[b]).norm();
  };
  return build_surface_from(faces, length, declared_k, pos);
}

ConeSurface read_off(const std::string& path, double declared_k) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Malformed, "cannot open mesh file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_off(buf.str(), declared_k);
}

std::string format_off(const ConeSurface& s) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "OFF\n" << s.vertex_count() << ' ' << s.face_count() << " 0\n";
  for (int v = 0; v < s.vertex_count(); ++v) {
    Vec3 p = s.has_positions() ? s.position(v) : Vec3::Zero();
    out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  for (const auto& f : s.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  std::ostringstream trailer;
  trailer << std::setprecision(17);
  int overrides = 0;
  for (const Edge& e : s.edges()) {
    double embedded = s.has_positions() ? (s.position(e.v0) - s.position(e.v1)).norm() : -1.0;
    if (std::abs(embedded - e.length) > 1e-14 * e.length) {
      trailer << e.v0 << ' ' << e.v1 << ' ' << e.length << '\n';
      ++overrides;
    }
  }
  if (overrides > 0) out << "#lengths\n" << trailer.str();
  return out.str();
}

void write_off(const ConeSurface& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Malformed, "cannot write mesh file " + path);
  out << format_off(s);
}

}  // namespace alexlab
