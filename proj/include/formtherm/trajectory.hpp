// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/mesh.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace formtherm {

/// Mechanical solution at one time point, per node.
struct ParameterSlice {
  Points displacement;                  // d [m]
  Eigen::VectorXd tool_distance;        // delta [m]
  Eigen::VectorXd contact_pressure;     // p_N [Pa]
  Eigen::VectorXd contact_temperature;  // T_inf [K]

  Index node_count() const { return tool_distance.size(); }
  static ParameterSlice zeros(Index nodes);
};

/// Offline mechanical solution entering the thermal model: one slice per time
/// point t_0 .. t_{n_t}.
struct ParameterTrajectory {
  std::vector<ParameterSlice> slices;

  Index size() const { return static_cast<Index>(slices.size()); }
  Index node_count() const { return slices.empty() ? 0 : slices.front().node_count(); }
  const ParameterSlice& operator[](Index k) const { return slices[static_cast<std::size_t>(k)]; }

  /// Checks shapes and the physical invariants (finite values, delta >= 0,
  /// p_N >= 0, p_N > 0 only where delta == 0, T_inf > 0). Throws FormatError
  /// with the offending step and node.
  void validate(std::optional<Index> nodes = std::nullopt,
                std::optional<Index> points = std::nullopt) const;
};

/// Nodal temperatures per time point plus optional sensor readings.
struct StateTrajectory {
  std::vector<Eigen::VectorXd> temperatures;  // q_k [K], k = 0 .. n_t
  Eigen::MatrixXd readings;                   // (n_t + 1) x m, row k = y_k [K]; may be empty

  Index size() const { return static_cast<Index>(temperatures.size()); }
  const Eigen::VectorXd& operator[](Index k) const { return temperatures[static_cast<std::size_t>(k)]; }
};

void save_parameter_trajectory(const std::string& path, const ParameterTrajectory& traj);
/// Loads and validates a trajectory; optional expectations check the node and
/// time-point counts against the mesh and grid.
ParameterTrajectory load_parameter_trajectory(const std::string& path,
                                              std::optional<Index> nodes = std::nullopt,
                                              std::optional<Index> points = std::nullopt);
/// One row per (step, node) for the selected nodes.
void export_parameter_csv(const std::string& path, const ParameterTrajectory& traj,
                          const std::vector<double>& times, const std::vector<Index>& nodes);

void save_state_trajectory(const std::string& path, const StateTrajectory& traj);
StateTrajectory load_state_trajectory(const std::string& path,
                                      std::optional<Index> nodes = std::nullopt,
                                      std::optional<Index> points = std::nullopt);

}  // namespace formtherm
