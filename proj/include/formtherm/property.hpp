// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/mesh.hpp"
#include "formtherm/time_grid.hpp"
#include "formtherm/trajectory.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace formtherm {

/// Hard iff the node cools through M_s with a trailing-window mean cooling
/// rate of at least the critical rate.
struct CoolingRateRule {
  double martensite_start = 443.0;  // M_s [K]
  double critical_rate = 10.0;      // [K/s]
  double hard_value = 520.0;        // [HV]
  double soft_value = 220.0;        // [HV]
  double window = 0.5;              // trailing window of the rate estimate [s]

  void validate() const;
};

enum class PropertyClass { kHard, kSoft, kUndetermined };

std::string to_string(PropertyClass c);

struct PropertyMap {
  Eigen::VectorXd values;              // per node [HV]
  std::vector<PropertyClass> classes;
  Eigen::VectorXd crossing_time;       // NaN where M_s is never crossed [s]
  Eigen::VectorXd cooling_rate;        // NaN where M_s is never crossed [K/s]

  Index size() const { return values.size(); }
};

/// Maps a temperature history to nodal properties.
class PropertyModel {
public:
  virtual ~PropertyModel() = default;
  virtual PropertyMap estimate(const std::vector<Eigen::VectorXd>& history, const TimeGrid& grid,
                               const ParameterTrajectory& parameters) const = 0;
};

class CoolingRateModel : public PropertyModel {
public:
  explicit CoolingRateModel(CoolingRateRule rule) : rule_(rule) { rule_.validate(); }
  PropertyMap estimate(const std::vector<Eigen::VectorXd>& history, const TimeGrid& grid,
                       const ParameterTrajectory& parameters) const override;
  const CoolingRateRule& rule() const { return rule_; }

private:
  CoolingRateRule rule_;
};

/// History-based estimate with the cooling-rate rule. Nodes that never cross
/// M_s from above are undetermined and receive the soft value.
PropertyMap estimate_properties(const std::vector<Eigen::VectorXd>& history, const std::vector<double>& times,
                                const CoolingRateRule& rule);

/// Fraction of nodes with identical hard/soft/undetermined class.
double classification_agreement(const PropertyMap& a, const PropertyMap& b);

/// node, x, y, z (deformed), value, class.
void export_property_csv(const std::string& path, const PropertyMap& map, const Mesh& mesh, const Points& displacement);

}  // namespace formtherm
