#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "alexlab/cli.hpp"
#include "alexlab/error.hpp"
#include "alexlab/verify.hpp"

namespace fs = std::filesystem;

namespace alexlab::cli {

namespace {

// Variables of every function expression, in this order.
const std::vector<std::string> kVars = {"x", "y", "z", "r", "d"};

ConeSurface make_generator(const std::string& name, const std::function<double(const std::string&)>& num,
                           const std::function<int(const std::string&)>& whole) {
  if (name == "flat_disk") return flat_disk(num("R"), num("h"));
  if (name == "cone_disk") return cone_disk(num("theta"), num("R"), num("h"));
  if (name == "flat_torus") return flat_torus(num("L"), num("h"));
  if (name == "icosphere") return icosphere(whole("subdivisions"));
  fail(ErrorCode::Config, "unknown generator '" + name + "'");
}

// Everything one experiment needs, built lazily from the config.
class Context {
 public:
  explicit Context(const Config& c) : c_(c) {
    std::string gen = c.text("geometry.generator");
    if (gen == "mesh") {
      fs::path file = c.text("geometry.file");
      if (file.is_relative()) file = fs::path(c.origin()).parent_path() / file;
      if (!fs::exists(file)) c.error("geometry.file", "file not found: " + file.string());
      surface_ = std::make_unique<ConeSurface>(read_off(file.string(), c.number("geometry.declared_k", 0.0)));
    } else {
      auto num = [&](const std::string& key) { return c.positive("geometry." + key); };
      auto whole = [&](const std::string& key) {
        int v = c.integer("geometry." + key, -1);
        if (v < 0) c.error("geometry." + key, "must be a non-negative integer");
        return v;
      };
      try {
        surface_ = std::make_unique<ConeSurface>(make_generator(gen, num, whole));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        c.error("geometry.generator", e.what());
      }
      if (c.has("geometry.declared_k")) {
        const ConeSurface& s = *surface_;
        std::vector<std::array<double, 3>> lengths;
        for (int f = 0; f < s.face_count(); ++f) lengths.push_back(s.face_lengths(f));
        surface_ = std::make_unique<ConeSurface>(
            build_surface(s.faces(), lengths, c.number("geometry.declared_k"), s.positions()));
      }
    }
    h_ = mesh_size(*surface_);
    spacing_ = c.positive("geometry.spacing", h_);
    std::string mode = c.text("geometry.distances", "exact");
    if (mode != "exact" && mode != "graph") c.error("geometry.distances", "expected exact or graph");
    exact_ = mode == "exact";
  }

  const Config& config() const { return c_; }
  const ConeSurface& surface() const { return *surface_; }
  double h() const { return h_; }
  bool exact() const { return exact_; }

  const DirichletOperator& op() {
    if (!op_) op_ = assemble_dirichlet(*surface_);
    return *op_;
  }

  std::shared_ptr<const SteinerGraph> graph() {
    if (!graph_) graph_ = std::make_shared<SteinerGraph>(*surface_, spacing_);
    return graph_;
  }

  DistanceField field(int source) {
    return exact_ ? exact_distance_field(graph(), source) : distance_field(graph(), source);
  }

  // params.<key> as a point (nearest vertex) or params.<key>_vertex.
  int vertex(const std::string& key, std::optional<int> fallback = std::nullopt) {
    const ConeSurface& s = *surface_;
    std::string vkey = "params." + key + "_vertex", pkey = "params." + key;
    if (c_.has(vkey)) {
      int v = c_.integer(vkey, -1);
      if (v < 0 || v >= s.vertex_count()) c_.error(vkey, "vertex out of range");
      return v;
    }
    if (c_.has(pkey)) {
      std::vector<double> xs = c_.numbers(pkey);
      if (xs.size() < 2 || xs.size() > 3) c_.error(pkey, "expected 2 or 3 coordinates");
      if (!s.has_positions()) c_.error(pkey, "surface has no embedding; use " + key + "_vertex");
      return nearest_vertex(s, Vec3(xs[0], xs[1], xs.size() > 2 ? xs[2] : 0.0));
    }
    if (fallback) return *fallback;
    if (!s.has_positions()) return 0;
    return nearest_vertex(s, Vec3::Zero());
  }

  int centre() {
    if (centre_ < 0) centre_ = vertex("p");
    return centre_;
  }

  const DistanceField& centre_field() {
    if (!centre_field_) centre_field_ = field(centre());
    return *centre_field_;
  }

  // Expression in x, y, z, r = |(x, y, z)|, d = distance from the centre.
  PLFunction function(const std::string& field) {
    Expression e = c_.expression(field, kVars);
    const ConeSurface& s = *surface_;
    bool uses_d = e.uses(4);
    const DistanceField* fd = uses_d ? &centre_field() : nullptr;
    std::vector<double> vals(s.vertex_count());
    for (int v = 0; v < s.vertex_count(); ++v) {
      Vec3 p = s.has_positions() ? s.position(v) : Vec3::Zero();
      vals[v] = e({p.x(), p.y(), p.z(), p.norm(), fd ? fd->at(v) : 0.0});
      if (!std::isfinite(vals[v])) c_.error(field, "not finite at vertex " + std::to_string(v));
    }
    return make_pl(s, std::move(vals));
  }

  PLFunction function(const std::string& field, double fallback) {
    return c_.has(field) ? function(field) : constant_pl(*surface_, fallback);
  }

  // params.u sampled, or the solution of L_u = source vol with u = boundary on the rim.
  PLFunction u() {
    bool sampled = c_.has("params.u"), solved = c_.has("params.boundary");
    if (sampled == solved) c_.error("params.u", "give exactly one of u and boundary");
    if (sampled) return function("params.u");
    if (!surface_->has_boundary()) c_.error("params.boundary", "surface has no boundary");
    PLFunction g = function("params.boundary");
    PLFunction f = function("params.source", 0.0);
    return solve_poisson_dirichlet(*surface_, op(), f, g);
  }

  Budget budget(Budget fallback) const {
    return {c_.number("params.tol_c0", fallback.c0), c_.number("params.tol_c1", fallback.c1)};
  }

  Region region() {
    if (!c_.has("params.region_radius")) return [](int) { return true; };
    double rho = c_.positive("params.region_radius");
    const DistanceField& f = centre_field();
    return [&f, rho](int v) { return f.at(v) <= rho; };
  }

 private:
  const Config& c_;
  std::unique_ptr<ConeSurface> surface_;
  double h_ = 0.0, spacing_ = 0.0;
  bool exact_ = true;
  std::optional<DirichletOperator> op_;
  std::shared_ptr<SteinerGraph> graph_;
  int centre_ = -1;
  std::optional<DistanceField> centre_field_;
};

ExperimentReport dispatch(const std::string& op, Context& x) {
  const Config& c = x.config();
  const ConeSurface& s = x.surface();

  if (op == "bochner_inequality_test") {
    PLFunction u = x.u();
    SourceTerm f{x.function("params.c", 0.0), c.number("params.lambda", 0.0)};
    if (f.lambda > 0) c.error("params.lambda", "must be <= 0");
    return bochner_inequality_test(s, x.op(), u, f, c.number("params.K", 0.0), x.region(),
                                   x.budget({0.05, 1.0}));
  }
  if (op == "key_comparison_test") {
    PLFunction u = x.u();
    PLFunction f = x.function("params.f", 0.0);
    return key_comparison_test(x.graph(), x.op(), u, f, c.number("params.K", 0.0), c.positive("params.t"),
                               c.numbers("params.a_grid", {1.0}), x.region(), x.budget({0.005, 0.1}));
  }
  if (op == "yau_gradient_report") {
    PLFunction u = x.u();
    return yau_gradient_report(x.op(), x.centre_field(), u, c.positive("params.R"), c.number("params.K", 0.0),
                               c.number("params.s", 8.0), c.positive("params.cap", 10.0),
                               x.budget({0.05, 0.0}));
  }
  if (op == "mean_value_report") {
    PLFunction u = x.u();
    PLFunction f = x.function("params.f", 0.0);
    return mean_value_report(x.op(), x.centre_field(), u, f, c.positive("params.R"), x.budget({0.002, 0.5}));
  }
  if (op == "perelman_concave_function") {
    PerelmanOptions o;
    o.geodesics = c.integer("params.geodesics", o.geodesics);
    o.audit_radius = c.number("params.audit_radius", 0.0);
    o.steps = c.integer("params.steps", o.steps);
    o.seed = static_cast<unsigned>(c.integer("params.seed", 1));
    o.exact = x.exact();
    o.budget = x.budget(o.budget);
    return perelman_concave_function(x.graph(), x.centre(), c.positive("params.r0"), c.positive("params.delta"), o)
        .second;
  }
  if (op == "aux_quadratic_function") {
    AuxQuadraticOptions o;
    o.covering_angle = c.positive("params.covering_angle", o.covering_angle);
    o.audit_fraction = c.positive("params.audit_fraction", o.audit_fraction);
    o.budget = x.budget(o.budget);
    return aux_quadratic_function(x.graph(), x.op(), x.centre(), c.positive("params.r"), o).second;
  }
  if (op == "direction_integral_test") {
    int q = -1;
    for (int v = 0; v < s.vertex_count() && q < 0; ++v)
      if (s.is_boundary(v)) q = v;
    q = x.vertex("q", q >= 0 ? std::optional<int>(q) : std::nullopt);
    if (q == x.centre()) c.error("params.q", "q must differ from p");
    DistanceField fq = x.field(q);
    return direction_integral_test(s, make_pl(s, fq.vertex_values()), x.centre(),
                                   c.integer("params.directions", 256), x.budget({0.02, 1.0}));
  }
  if (op == "sphere_expansion_test") {
    PLFunction f = x.function("params.f");
    return sphere_expansion_test(x.centre_field(), f, c.numbers("params.radii"), x.budget({0.05, 1.0}));
  }
  if (op == "lichnerowicz_test") return lichnerowicz_test(s, x.op(), c.positive("params.allowance", 0.05));
  if (op == "liouville_test")
    return liouville_test(s, x.op(), static_cast<unsigned>(c.integer("params.seed", 1)));
  if (op == "bishop_gromov_test")
    return bishop_gromov_test(x.centre_field(), c.numbers("params.radii"), x.budget({0.005, 0.1}));
  if (op == "harmonic_measure_test") {
    PLFunction u = x.u();
    return harmonic_measure_test(x.op(), x.centre_field(), u, c.positive("params.R"), c.integer("params.m", 8),
                                 x.budget({0.01, 0.5}));
  }
  if (op == "toponogov_test") {
    DistanceCache cache(s, x.h() * c.positive("params.spacing_factor", 0.125));
    return toponogov_test(cache, c.number("params.kappa"), c.integer("params.quadruples", 1000),
                          static_cast<unsigned>(c.integer("params.seed", 1)), x.budget({0.0, 3.0}));
  }
  if (op == "semigroup_audit") {
    PLFunction u = x.u();
    return semigroup_audit(x.graph(), u, c.numbers("params.times"), x.h(), c.number("params.derivative_tol", 0.0));
  }
  if (op == "footpoint_audit") {
    PLFunction u = x.u();
    HopfLaxResult r = hopf_lax(x.graph(), u, c.positive("params.t"));
    return footpoint_audit(*x.graph(), r, u, x.h(), c.number("params.identity_tol", 0.0));
  }
  c.error("experiment.operation", "unknown operation '" + op + "'");
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Domain, "cannot write " + path.string());
  out << text;
}

std::string default_name(const Config& c) {
  return c.text("experiment.name", fs::path(c.origin()).stem().string());
}

}  // namespace

nlohmann::ordered_json report_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["name"] = r.name;
  j["params"] = r.params;
  j["slacks"] = r.slacks;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["fitted"] = r.fitted;
  j["meta"] = r.meta;
  return j;
}

RunOutcome run_config(const Config& c, const std::string& output_override) {
  RunOutcome out;
  out.name = default_name(c);
  std::string op = c.text("experiment.operation");
  fs::path dir = output_override.empty() ? fs::path(c.text("experiment.output", "out/" + out.name))
                                         : fs::path(output_override);
  if (dir.is_relative() && output_override.empty()) dir = fs::path(c.origin()).parent_path() / dir;

  Context x(c);
  ExperimentReport rep = dispatch(op, x);
  c.reject_unused();

  rep.meta["operation"] = rep.name;
  rep.meta["config"] = c.dump();
  rep.name = out.name;

  fs::create_directories(dir);
  write_text(dir / "report.json", report_json(rep).dump(2) + "\n");
  std::ostringstream sl;
  sl << "index,slack\n";
  for (std::size_t i = 0; i < rep.slacks.size(); ++i) sl << i << ',' << format_number(rep.slacks[i]) << '\n';
  write_text(dir / "slacks.csv", sl.str());
  for (const auto& [plot, pts] : rep.plots) {
    std::ostringstream os;
    os << "x,y\n";
    for (auto [a, b] : pts) os << format_number(a) << ',' << format_number(b) << '\n';
    write_text(dir / ("plot_" + plot + ".csv"), os.str());
  }
  out.report = std::move(rep);
  out.output_dir = dir.string();
  return out;
}

int run_command(const std::string& path, const std::string& output_override) {
  try {
    RunOutcome r = run_config(Config::load(path), output_override);
    std::cout << r.name << ": " << (r.report.pass ? "pass" : "FAIL") << " (min slack "
              << format_number(r.report.min_slack()) << ", tolerance " << format_number(r.report.tolerance)
              << ") -> " << r.output_dir << "\n";
    return r.report.pass ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int thread_limit() {
  if (const char* env = std::getenv("ALEXLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int suite_command(const std::string& dir, const std::string& output_dir, int threads) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: not a directory: " << dir << "\n";
    return 1;
  }
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());

  struct Row {
    std::string name;
    std::string status;  // pass, fail, error
    double min_slack = 0, tolerance = 0, seconds = 0;
    std::string message;
  };
  std::vector<Row> rows(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      Row& row = rows[i];
      row.name = configs[i].stem().string();
      auto t0 = std::chrono::steady_clock::now();
      try {
        Config c = Config::load(configs[i].string());
        row.name = default_name(c);
        std::string out = output_dir.empty() ? "" : (fs::path(output_dir) / row.name).string();
        RunOutcome r = run_config(c, out);
        row.status = r.report.pass ? "pass" : "fail";
        row.min_slack = r.report.min_slack();
        row.tolerance = r.report.tolerance;
      } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard<std::mutex> lock(log);
      std::cout << row.name << ": " << row.status << (row.message.empty() ? "" : " (" + row.message + ")") << "\n";
    }
  };
  int n = std::min<int>(threads > 0 ? threads : thread_limit(), std::max<std::size_t>(configs.size(), 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.name < b.name; });
  std::ostringstream csv;
  csv << "experiment,pass,min_slack,tolerance,wall_time_s\n";
  bool any_error = false, any_fail = false;
  for (const Row& r : rows) {
    any_error |= r.status == "error";
    any_fail |= r.status == "fail";
    csv << r.name << ',' << (r.status == "pass" ? "true" : r.status == "fail" ? "false" : "error") << ','
        << (r.status == "error" ? "" : format_number(r.min_slack)) << ','
        << (r.status == "error" ? "" : format_number(r.tolerance)) << ',' << std::fixed << std::setprecision(3)
        << r.seconds << std::defaultfloat << '\n';
  }
  fs::path target = output_dir.empty() ? fs::path(dir) : fs::path(output_dir);
  try {
    fs::create_directories(target);
    write_text(target / "summary.csv", csv.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return any_error ? 1 : any_fail ? 2 : 0;
}

int mesh_command(const std::string& generator, const std::vector<std::string>& params, const std::string& output) {
  try {
    std::map<std::string, std::string> kv;
    for (const std::string& p : params) {
      auto eq = p.find('=');
      if (eq == std::string::npos) fail(ErrorCode::Config, "mesh parameter '" + p + "' is not key=value");
      kv[p.substr(0, eq)] = p.substr(eq + 1);
    }
    std::set<std::string> used;
    auto num = [&](const std::string& key) {
      auto it = kv.find(key);
      if (it == kv.end()) fail(ErrorCode::Config, "mesh parameter '" + key + "' is missing");
      used.insert(key);
      double v = Expression::parse(it->second, {})();
      if (!(v > 0) || !std::isfinite(v)) fail(ErrorCode::Config, "mesh parameter '" + key + "' must be positive");
      return v;
    };
    auto whole = [&](const std::string& key) {
      double v = num(key);
      if (v != std::round(v)) fail(ErrorCode::Config, "mesh parameter '" + key + "' must be an integer");
      return static_cast<int>(v);
    };
    ConeSurface s = make_generator(generator, num, whole);
    for (const auto& [k, v] : kv)
      if (!used.count(k)) fail(ErrorCode::Config, "unknown mesh parameter '" + k + "'");
    write_off(s, output);
    std::cout << generator << ": " << s.vertex_count() << " vertices, " << s.face_count() << " faces -> "
              << output << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace alexlab::cli
