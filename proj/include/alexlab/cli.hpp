#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "alexlab/report.hpp"
#include "json.hpp"

namespace alexlab::cli {

/// Version of the report and summary layouts written by the runner.
constexpr int kReportSchemaVersion = 1;

/// Arithmetic expression over named variables: + - * / ^, unary minus,
/// sin cos tan exp log sqrt abs atan2 min max pow, constants pi and e.
class Expression {
 public:
  /// Variables are bound by position in `variables`.
  static Expression parse(const std::string& text, const std::vector<std::string>& variables);
  double operator()(const std::vector<double>& values = {}) const;
  const std::string& text() const { return text_; }
  bool uses(int variable) const;

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

/// `key = value` lines grouped under `[section]` headers; `#` starts a comment.
/// Every lookup marks the key as used; reject_unused() then reports leftovers.
/// Errors name the origin, the line and the field.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin);
  static Config load(const std::string& path);

  const std::string& origin() const { return origin_; }
  bool has(const std::string& field) const;  // "section.key"

  std::string text(const std::string& field) const;
  std::string text(const std::string& field, const std::string& fallback) const;
  double number(const std::string& field) const;
  double number(const std::string& field, double fallback) const;
  int integer(const std::string& field, int fallback) const;
  bool boolean(const std::string& field, bool fallback) const;
  std::vector<double> numbers(const std::string& field) const;
  std::vector<double> numbers(const std::string& field, const std::vector<double>& fallback) const;
  Expression expression(const std::string& field, const std::vector<std::string>& variables) const;

  /// Range checks that raise with the field's line.
  double positive(const std::string& field) const;
  double positive(const std::string& field, double fallback) const;

  [[noreturn]] void error(const std::string& field, const std::string& message) const;
  void reject_unused() const;
  /// Fields and raw values in file order.
  nlohmann::ordered_json dump() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string origin_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  mutable std::set<std::string> used_;

  const Entry& entry(const std::string& field) const;
};

/// {schema_version, name, params, slacks, tolerance, pass, fitted, meta}.
nlohmann::ordered_json report_json(const ExperimentReport& report);

struct RunOutcome {
  std::string name;
  ExperimentReport report;
  std::string output_dir;
};

/// Runs the experiment of a parsed config and writes report.json, slacks.csv
/// and one two-column CSV per plot into the output directory.
RunOutcome run_config(const Config& config, const std::string& output_override = "");

/// Exit codes: 0 pass, 2 fail, 1 error.
int run_command(const std::string& path, const std::string& output_override = "");
/// Runs every *.cfg of the directory and writes summary.csv there (or into
/// `output_dir`). Errors become rows; exit 1 if any, else 2 if any fails.
int suite_command(const std::string& dir, const std::string& output_dir = "", int threads = 0);
/// `params` are key=value strings for the generator.
int mesh_command(const std::string& generator, const std::vector<std::string>& params,
                 const std::string& output);

/// ALEXLAB_THREADS when set and positive, else the hardware concurrency.
int thread_limit();

}  // namespace alexlab::cli
