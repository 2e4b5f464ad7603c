// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/scenario.hpp"

#include "formtherm/error.hpp"

#include <algorithm>
#include <cmath>

namespace formtherm {

namespace {

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace

void ToolSpec::validate(double hole_radius, double outer_radius) const {
  if (!(punch_radius > hole_radius)) throw ValidationError("punch radius must exceed the hole radius");
  if (!(contact_radius >= punch_radius)) throw ValidationError("tool footprint must cover the punch radius");
  if (!(contact_radius < outer_radius)) throw ValidationError("tool footprint must lie inside the blank");
  if (!(flange_band > 0.0)) throw ValidationError("flange band must be positive");
  if (!(flange_depth >= 0.0)) throw ValidationError("flange depth must be non-negative");
  if (!(first_contact > 0.0 && first_contact <= 1.0)) throw ValidationError("first contact must lie in (0, 1]");
  if (!(ambient_gap > 0.0)) throw ValidationError("ambient gap must be positive");
  if (!(contact_pressure >= 0.0)) throw ValidationError("contact pressure must be non-negative");
  if (!(tool_temperature > 0.0) || !(ambient_temperature > 0.0))
    throw ValidationError("tool and ambient temperatures must be positive");
}

void SensorConfig::validate() const {
  if (positions.empty()) throw ValidationError("at least one sensor is required");
  if (!(sigma_v >= 0.0)) throw ValidationError("sensor noise standard deviation must be non-negative");
  if (!(max_distance > 0.0)) throw ValidationError("sensor capture radius must be positive");
  for (const auto& p : positions)
    if (!p.allFinite()) throw ValidationError("sensor positions must be finite");
}

ParameterTrajectory synth_forming_trajectory(const Mesh& mesh, const TimeGrid& grid,
                                             const ProcessInputs& u, const ToolSpec& tool,
                                             double contact_threshold) {
  u.validate();
  const Eigen::VectorXd radius = reference_radius(mesh);
  const double hole = radius.minCoeff();
  const double outer = radius.maxCoeff();
  tool.validate(hole, outer);
  if (!(tool.ambient_gap > contact_threshold))
    throw ValidationError("ambient gap must exceed the contact threshold");

  const Index n = mesh.node_count();
  const Index n_t = grid.steps();
  const Index form0 = grid.first_step(Phase::kForming), n_form = grid.step_count(Phase::kForming);
  const Index dem0 = grid.first_step(Phase::kDemoulding), n_dem = grid.step_count(Phase::kDemoulding);

  // Forming progress at which each node closes onto the tool (> 1: never).
  Eigen::VectorXd onset(n);
  Eigen::VectorXd profile(n);
  for (Index i = 0; i < n; ++i) {
    const double r = radius[i];
    onset[i] = r <= tool.contact_radius
                   ? tool.first_contact + (1.0 - tool.first_contact) *
                                              std::clamp((r - hole) / (tool.contact_radius - hole), 0.0, 1.0)
                   : 2.0;
    profile[i] = -tool.flange_depth * smoothstep((tool.punch_radius - r) / tool.flange_band);
  }

  ParameterTrajectory traj;
  traj.slices.reserve(static_cast<std::size_t>(n_t + 1));
  for (Index k = 0; k <= n_t; ++k) {
    const Phase phase = k < n_t ? grid.phase(k) : grid.phase(n_t - 1);
    ParameterSlice s = ParameterSlice::zeros(n);
    s.tool_distance.setConstant(tool.ambient_gap);
    s.contact_temperature.setConstant(tool.ambient_temperature);

    switch (phase) {
      case Phase::kTransfer:
        break;
      case Phase::kForming: {
        const double f = static_cast<double>(k - form0) / static_cast<double>(n_form);
        s.displacement.col(2) = f * profile;
        for (Index i = 0; i < n; ++i) {
          if (onset[i] > 1.0) continue;
          if (f >= onset[i]) {
            s.tool_distance[i] = 0.0;
            s.contact_pressure[i] = onset[i] < 1.0
                                        ? tool.contact_pressure * (f - onset[i]) / (1.0 - onset[i])
                                        : 0.0;
          } else {
            s.tool_distance[i] = tool.ambient_gap * (1.0 - f / onset[i]);
          }
        }
        break;
      }
      case Phase::kHolding:
        s.displacement.col(2) = profile;
        for (Index i = 0; i < n; ++i) {
          if (onset[i] > 1.0) continue;
          s.tool_distance[i] = 0.0;
          s.contact_pressure[i] = tool.contact_pressure;
        }
        break;
      case Phase::kDemoulding: {
        // Tools lift off from the first demoulding step on.
        const double f = k < n_t ? static_cast<double>(k - dem0 + 1) / static_cast<double>(n_dem) : 1.0;
        const double lift = tool.ambient_gap * std::min(1.0, f / 0.2);
        s.displacement.col(2) = profile;
        for (Index i = 0; i < n; ++i) {
          if (onset[i] <= 1.0) s.tool_distance[i] = std::max(lift, 2.0 * contact_threshold);
        }
        break;
      }
    }
    for (Index i = 0; i < n; ++i) {
      if (s.tool_distance[i] <= contact_threshold) s.contact_temperature[i] = tool.tool_temperature;
    }
    traj.slices.push_back(std::move(s));
  }
  return traj;
}

ScenarioRun realize(const Scenario& scenario, const ProcessInputs& u) {
  ScenarioRun run;
  run.inputs = u;
  run.grid = build_time_grid(scenario.phase_template.size(), u, scenario.reference, scenario.phase_template);
  run.parameters = synth_forming_trajectory(scenario.mesh, run.grid, u, scenario.tool, scenario.contact_threshold);
  return run;
}

void build_mesh(Scenario& scenario) {
  scenario.mesh = build_sheet_mesh(scenario.geometry, scenario.resolution);
}

}  // namespace formtherm
