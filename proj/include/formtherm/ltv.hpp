// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/galerkin.hpp"

#include <string>
#include <vector>

namespace formtherm {

/// Reduced matrices frozen along a supporting trajectory, one entry per time
/// point t_0 .. t_{n_t}. Step k uses entry k. Once built, no full-order data is
/// needed to run the ROM.
struct LtvSchedule {
  std::string supporting_id;
  std::vector<double> step_sizes;          // h_k of the supporting grid [s]
  std::vector<ReducedMatrices> entries;
  std::vector<double> mass_condition;      // cond(M_r,k), 2-norm

  Index steps() const { return static_cast<Index>(step_sizes.size()); }
  Index rank() const { return entries.empty() ? 0 : entries.front().mass.rows(); }
  Index disturbances() const { return entries.empty() ? 0 : entries.front().disturbance.cols(); }
  Index outputs() const { return entries.empty() ? 0 : entries.front().output.rows(); }
  const ReducedMatrices& operator[](Index k) const { return entries[static_cast<std::size_t>(k)]; }

  void validate() const;
};

/// Assembles (M, K, b, E, C) at the supporting state q_k and parameters p_k and
/// projects them with Phi.
LtvSchedule build_ltv_schedule(const ReducedSystem& rom, const ScenarioRun& supporting,
                               const StateTrajectory& supporting_states, const std::string& id);

void save_ltv_schedule(const std::string& path, const LtvSchedule& schedule);
LtvSchedule load_ltv_schedule(const std::string& path);

/// Semi-implicit Euler through the schedule. The grid supplies the step sizes
/// (inputs with other punch speeds or holding times reuse the per-step
/// matrices with their own h_k) and the times at which d is evaluated.
ReducedTrajectory simulate_rom(const LtvSchedule& schedule, const TimeGrid& grid, const Eigen::VectorXd& x0,
                               const DisturbanceSignal& disturbance);

/// Reduced outputs C_r,k x_k, one row per time point.
Eigen::MatrixXd rom_outputs(const LtvSchedule& schedule, const ReducedTrajectory& traj);

}  // namespace formtherm
