#include "alexlab/report.hpp"

#include <algorithm>
#include <limits>

#include "alexlab/error.hpp"

namespace alexlab {

void ExperimentReport::set_budget(double c0, double c1, double h) {
  tolerance = c0 + c1 * h;
  if (!(tolerance > 0)) fail(ErrorCode::Domain, "tolerance budget must be positive");
  meta["tolerance_budget"] = {{"c0", c0}, {"c1", c1}, {"h", h}};
}

void ExperimentReport::add_check(const std::string& check, double margin, double check_tol) {
  if (!(tolerance > 0) || !(check_tol > 0))
    fail(ErrorCode::Domain, "add_check needs positive tolerances");
  slacks.push_back(margin * tolerance / check_tol);
  auto& entry = meta["checks"][check];
  if (entry.is_null()) {
    entry = {{"tolerance", check_tol}, {"min_margin", margin}, {"samples", 1}};
  } else {
    entry["min_margin"] = std::min(entry["min_margin"].get<double>(), margin);
    entry["samples"] = entry["samples"].get<int>() + 1;
  }
}

void ExperimentReport::add_exact(const std::string& check, bool holds) {
  if (!(tolerance > 0)) fail(ErrorCode::Domain, "add_exact needs a positive tolerance");
  slacks.push_back(holds ? 0.0 : -2.0 * tolerance);
  auto& entry = meta["checks"][check];
  if (entry.is_null()) entry = {{"exact", true}, {"violations", 0}, {"samples", 0}};
  entry["samples"] = entry["samples"].get<int>() + 1;
  if (!holds) entry["violations"] = entry["violations"].get<int>() + 1;
}

void ExperimentReport::add_plot(const std::string& plot,
                                std::vector<std::pair<double, double>> points) {
  plots.emplace_back(plot, std::move(points));
}

double ExperimentReport::min_slack() const {
  if (slacks.empty()) return std::numeric_limits<double>::infinity();
  return *std::min_element(slacks.begin(), slacks.end());
}

void ExperimentReport::finalize() {
  pass = true;
  for (double s : slacks)
    if (!(s >= -tolerance)) pass = false;
}

}  // namespace alexlab
