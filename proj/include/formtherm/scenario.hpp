// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/mesh.hpp"
#include "formtherm/time_grid.hpp"
#include "formtherm/trajectory.hpp"

#include <Eigen/Core>

#include <vector>

namespace formtherm {

/// Rigid, isothermal tooling of the hole-flanging stage and the synthetic
/// kinematics that stand in for the mechanical solution.
struct ToolSpec {
  double punch_radius = 0.09;         // bending line of the collar [m]
  double flange_band = 0.02;          // width of the bending zone [m]
  double flange_depth = 0.02;         // final collar depth [m]
  double contact_radius = 0.20;       // outer radius of the tool footprint [m]
  double first_contact = 0.6;         // forming progress at which the hole edge touches
  double ambient_gap = 0.01;          // tool distance of free surfaces [m]
  double contact_pressure = 20.0e6;   // contact pressure at full closure [Pa]
  double tool_temperature = 350.0;    // [K]
  double ambient_temperature = 300.0; // [K]

  void validate(double hole_radius, double outer_radius) const;
};

/// Sensors fixed in the world frame.
struct SensorConfig {
  std::vector<Eigen::Vector3d> positions;  // [m]
  double sigma_v = 10.0;                   // measurement noise std [K]
  double max_distance = 0.02;              // nearest node must lie within this radius [m]

  Index count() const { return static_cast<Index>(positions.size()); }
  void validate() const;
};

/// Everything that defines a forming scenario apart from the process inputs.
struct Scenario {
  AnnulusGeometry geometry;
  double resolution = 0.01;  // target mesh edge length [m]
  Mesh mesh;
  PhaseTemplate phase_template;
  ProcessInputs reference;  // inputs of the supporting trajectory
  ToolSpec tool;
  SensorConfig sensors;
  double contact_threshold = 1.0e-6;  // [m]
};

/// Time grid and mechanical surrogate for one set of process inputs.
struct ScenarioRun {
  ProcessInputs inputs;
  TimeGrid grid;
  ParameterTrajectory parameters;
};

/// Synthetic hole-flanging motion. Transfer: no displacement, free surfaces at
/// ambient. Forming: the collar bends down with a smoothstep profile and the
/// tool closes progressively from the hole edge outwards, pressure ramping
/// after contact. Holding: full contact. Demoulding: tools retract.
/// Configurations depend on the step index only, never on the step sizes.
ParameterTrajectory synth_forming_trajectory(const Mesh& mesh, const TimeGrid& grid,
                                             const ProcessInputs& u, const ToolSpec& tool,
                                             double contact_threshold);

/// Builds the grid and the synthetic trajectory for the given inputs.
ScenarioRun realize(const Scenario& scenario, const ProcessInputs& u);

/// Builds the mesh of a scenario from its geometry and resolution.
void build_mesh(Scenario& scenario);

}  // namespace formtherm
