// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/property.hpp"

#include "formtherm/csv.hpp"
#include "formtherm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace formtherm {

void CoolingRateRule::validate() const {
  if (!(martensite_start > 0.0)) throw ValidationError("M_s must be positive");
  if (!(critical_rate >= 0.0)) throw ValidationError("critical cooling rate must be non-negative");
  if (!(window > 0.0)) throw ValidationError("cooling-rate window must be positive");
  if (!(hard_value >= soft_value)) throw ValidationError("hard value must not be below the soft value");
}

std::string to_string(PropertyClass c) {
  switch (c) {
    case PropertyClass::kHard: return "hard";
    case PropertyClass::kSoft: return "soft";
    case PropertyClass::kUndetermined: return "undetermined";
  }
  return "?";
}

namespace {

// Temperature of node i at time t by linear interpolation in the history.
double sample(const std::vector<Eigen::VectorXd>& history, const std::vector<double>& times, Index i, double t) {
  if (t <= times.front()) return history.front()[i];
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.end()) return history.back()[i];
  const auto k = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return (1.0 - w) * history[k - 1][i] + w * history[k][i];
}

}  // namespace

PropertyMap estimate_properties(const std::vector<Eigen::VectorXd>& history, const std::vector<double>& times,
                                const CoolingRateRule& rule) {
  rule.validate();
  if (history.empty() || history.size() != times.size())
    throw ValidationError("property estimate needs one temperature vector per time point");
  if (times.back() - times.front() < rule.window)
    throw ValidationError("history spans less than the cooling-rate window");
  const Index n = history.front().size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  PropertyMap map;
  map.values = Eigen::VectorXd::Constant(n, rule.soft_value);
  map.classes.assign(static_cast<std::size_t>(n), PropertyClass::kUndetermined);
  map.crossing_time = Eigen::VectorXd::Constant(n, nan);
  map.cooling_rate = Eigen::VectorXd::Constant(n, nan);
  const double ms = rule.martensite_start;
  for (Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k + 1 < history.size(); ++k) {
      const double a = history[k][i];
      const double b = history[k + 1][i];
      if (!(a >= ms && b < ms)) continue;
      const double tc = times[k] + (a - ms) / (a - b) * (times[k + 1] - times[k]);
      const double t0 = std::max(times.front(), tc - rule.window);
      const double rate = tc > t0 ? (sample(history, times, i, t0) - ms) / (tc - t0) : 0.0;
      map.crossing_time[i] = tc;
      map.cooling_rate[i] = rate;
      const bool hard = rate >= rule.critical_rate;
      map.classes[static_cast<std::size_t>(i)] = hard ? PropertyClass::kHard : PropertyClass::kSoft;
      map.values[i] = hard ? rule.hard_value : rule.soft_value;
      break;
    }
  }
  return map;
}

PropertyMap CoolingRateModel::estimate(const std::vector<Eigen::VectorXd>& history, const TimeGrid& grid,
                                       const ParameterTrajectory&) const {
  return estimate_properties(history, grid.times(), rule_);
}

double classification_agreement(const PropertyMap& a, const PropertyMap& b) {
  if (a.size() != b.size() || a.size() == 0) throw ValidationError("property maps differ in size");
  Index same = 0;
  for (std::size_t i = 0; i < a.classes.size(); ++i) same += a.classes[i] == b.classes[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

void export_property_csv(const std::string& path, const PropertyMap& map, const Mesh& mesh, const Points& displacement) {
  if (map.size() != mesh.node_count() || displacement.rows() != mesh.node_count())
    throw ValidationError("property map does not match the mesh");
  CsvWriter csv(path, {"nodal property estimate", "x, y, z: deformed coordinates [m]; value [HV]"},
                {"node", "class", "x", "y", "z", "value"});
  for (Index i = 0; i < map.size(); ++i) {
    const Eigen::RowVector3d p = mesh.reference.row(i) + displacement.row(i);
    const double v[4] = {p[0], p[1], p[2], map.values[i]};
    csv.row({std::to_string(i), to_string(map.classes[static_cast<std::size_t>(i)])}, v);
  }
  csv.close();
}

}  // namespace formtherm
