#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace alexlab {

/// Outcome of one inequality check. Slacks are signed: a sample passes when its
/// slack is >= -tolerance. Checks with their own tolerance are rescaled onto
/// the report tolerance by add_check.
struct ExperimentReport {
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<double> slacks;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::ordered_json fitted = nlohmann::ordered_json::object();
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> plots;

  /// tolerance = c0 + c1 * h, coefficients recorded in meta.
  void set_budget(double c0, double c1, double h);
  /// Appends margin * tolerance / check_tol so that margin >= -check_tol passes.
  void add_check(const std::string& check, double margin, double check_tol);
  /// Check without tolerance: records 0 when it holds and -2 * tolerance when not.
  void add_exact(const std::string& check, bool holds);
  void add_plot(const std::string& plot, std::vector<std::pair<double, double>> points);
  double min_slack() const;
  /// Sets pass from the slacks; an empty slack list passes.
  void finalize();
};

}  // namespace alexlab
