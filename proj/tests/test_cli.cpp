#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "alexlab/cli.hpp"
#include "alexlab/error.hpp"
#include "alexlab/surface.hpp"
#include "doctest.h"

using namespace alexlab;
using namespace alexlab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("alexlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kLiouville = R"([experiment]
operation = liouville_test

[geometry]
generator = flat_torus
L = 1
h = 1/8
)";

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("expressions") {
  CHECK(Expression::parse("1 + 2 * 3", {})() == 7);
  CHECK(Expression::parse("-2^2", {})() == -4);
  CHECK(Expression::parse("2^3^2", {})() == 512);
  CHECK(Expression::parse("3*pi/2", {})() == doctest::Approx(1.5 * std::numbers::pi));
  Expression e = Expression::parse("x^2 - y^2 + atan2(y, x) + max(x, 0)", {"x", "y"});
  CHECK(e({2, 1}) == doctest::Approx(3 + std::atan2(1.0, 2.0) + 2));
  CHECK(e.uses(1));
  CHECK(!Expression::parse("x + 1", {"x", "y"}).uses(1));
  CHECK_THROWS_AS(Expression::parse("x +", {"x"}), Error);
  CHECK_THROWS_AS(Expression::parse("q", {"x"}), Error);
  CHECK_THROWS_AS(Expression::parse("sin(1, 2)", {}), Error);
  CHECK_THROWS_AS(Expression::parse("(1", {}), Error);
}

TEST_CASE("config parsing and errors") {
  Config c = Config::parse("# header\n[geometry]\nh = 0.05  # comment\nR = 1\n[params]\nradii = 0.1, 2*0.1\n", "t.cfg");
  CHECK(c.number("geometry.h") == 0.05);
  CHECK(c.numbers("params.radii") == std::vector<double>{0.1, 0.2});
  CHECK(c.number("params.K", 3.0) == 3.0);
  CHECK(message_of([&] { c.reject_unused(); }).find("t.cfg:4: field 'geometry.R'") == 0);

  CHECK(message_of([] { Config::parse("[a]\nnovalue\n", "x.cfg"); }) == "x.cfg:2: expected 'key = value'");
  CHECK(message_of([] { Config::parse("k = 1\n", "x.cfg"); }).find("x.cfg:1:") == 0);
  CHECK(message_of([] { Config::parse("[a]\nk = 1\nk = 2\n", "x.cfg"); }).find("x.cfg:3:") == 0);
  Config neg = Config::parse("[geometry]\n\nh = -1\n", "n.cfg");
  CHECK(message_of([&] { neg.positive("geometry.h"); }) == "n.cfg:3: field 'geometry.h': must be positive");
  CHECK(message_of([&] { neg.integer("geometry.h", 0); }).empty());
  Config bad = Config::parse("[p]\nt = 2 +\n", "b.cfg");
  CHECK(message_of([&] { bad.number("p.t"); }).find("b.cfg:2: field 'p.t'") == 0);
}

TEST_CASE("run writes a reproducible report") {
  fs::path dir = scratch("run");
  write(dir / "torus.cfg", kLiouville);
  CHECK(run_command((dir / "torus.cfg").string()) == 0);
  fs::path out = dir / "out" / "torus";
  std::string first = slurp(out / "report.json");
  CHECK(run_command((dir / "torus.cfg").string()) == 0);
  CHECK(slurp(out / "report.json") == first);

  auto j = nlohmann::json::parse(first);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["name"] == "torus");
  CHECK(j["pass"] == true);
  for (const char* key : {"params", "slacks", "tolerance", "fitted", "meta"}) CHECK(j.contains(key));
  CHECK(j["meta"]["operation"] == "liouville_test");
  CHECK(fs::exists(out / "slacks.csv"));

  write(dir / "bad.cfg", std::string(kLiouville) + "\n[params]\nseed = 1.5\n");
  CHECK(run_command((dir / "bad.cfg").string()) == 1);
  write(dir / "failing.cfg", "[experiment]\noperation = lichnerowicz_test\n[geometry]\ngenerator = icosphere\n"
                             "subdivisions = 2\ndeclared_k = 2\n");
  CHECK(run_command((dir / "failing.cfg").string()) == 2);
}

TEST_CASE("suite summaries") {
  fs::path empty = scratch("empty");
  CHECK(suite_command(empty.string()) == 0);
  CHECK(slurp(empty / "summary.csv") == "experiment,pass,min_slack,tolerance,wall_time_s\n");

  fs::path dir = scratch("suite");
  for (const char* name : {"c", "a", "b"}) write(dir / (std::string(name) + ".cfg"), kLiouville);
  write(dir / "broken.cfg", "[experiment\n");
  write(dir / "notes.txt", "ignored");
  CHECK(suite_command(dir.string(), "", 2) == 1);
  std::stringstream csv(slurp(dir / "summary.csv"));
  std::vector<std::string> rows;
  for (std::string line; std::getline(csv, line);) rows.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
  CHECK(rows == std::vector<std::string>{"experiment,pass", "a,true", "b,true", "broken,error", "c,true"});
}

TEST_CASE("mesh command") {
  fs::path dir = scratch("mesh");
  CHECK(mesh_command("cone_disk", {"theta=3*pi/2", "R=1", "h=0.1"}, (dir / "cone.off").string()) == 0);
  ConeSurface s = read_off((dir / "cone.off").string());
  CHECK(s.cone_angle(0) == doctest::Approx(1.5 * std::numbers::pi));
  CHECK(mesh_command("cone_disk", {"theta=3*pi/2", "R=1"}, (dir / "x.off").string()) == 1);
  CHECK(mesh_command("flat_disk", {"R=1", "h=0.1", "w=2"}, (dir / "x.off").string()) == 1);
  CHECK(mesh_command("klein_bottle", {}, (dir / "x.off").string()) == 1);
}
