// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/config.hpp"
#include "formtherm/ekf.hpp"
#include "formtherm/ltv.hpp"
#include "formtherm/pod.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace formtherm {

/// Full-order model of a scenario config; `induced_heat` overrides g(T).
FullOrderSystem make_system(const ScenarioConfig& config, const std::optional<PiecewiseLinear>& induced_heat = {});

struct FomRun {
  RunSpec spec;
  ScenarioRun run;
  StateTrajectory states;
};

FomRun run_fom(const FullOrderSystem& system, const Scenario& scenario, const RunSpec& spec);

/// Runs the requests on up to `threads` workers (0 = hardware concurrency).
/// Results keep the request order.
std::vector<FomRun> run_fom_batch(const FullOrderSystem& system, const Scenario& scenario,
                                  const std::vector<RunSpec>& specs, unsigned threads);

struct RomArtifacts {
  PodBasis basis;         // rank = largest rank needed by the experiment
  LtvSchedule schedule;   // built with `basis` along the supporting run
  Index estimator_rank = 0;
};

/// Snapshots of all runs, POD, and the LTV schedule along `supporting`.
RomArtifacts reduce(const FullOrderSystem& system, const SensorConfig& sensors, const std::vector<FomRun>& runs,
                    const FomRun& supporting, const RomSpec& spec);

/// The leading r x r blocks of a schedule are the schedule of the truncated basis.
/// Sweep runs, the supporting run (appended when the sweep lacks it) and the
/// excitation runs. `supporting` receives the index of the supporting run.
std::vector<RunSpec> snapshot_specs(const ExperimentConfig& config, std::size_t& supporting);

/// ROM rank selected by the experiment's basis rule.
Index rank_for(const ExperimentConfig& config, const PodBasis& basis);

LtvSchedule truncate_schedule(const LtvSchedule& schedule, Index r);

/// clean + sigma * N(0, 1), drawn row by row from a generator seeded with `seed`.
Eigen::MatrixXd noisy_readings(const Eigen::MatrixXd& clean, double sigma, std::uint64_t seed);

struct EstimationOutcome {
  EstimatorResult filter;
  std::vector<Eigen::VectorXd> lifted;  // Phi x_r per time point
  Eigen::VectorXd rmse;                 // against the reference, empty without one
  Eigen::MatrixXd disturbance;          // d-hat per time point (zero columns when not estimated)
  bool disturbance_estimated = false;
};

/// EKF on the discretised schedule (augmented unless `with_disturbance` is
/// false) with x0 = Phi^T q0, P0 = blockdiag(p0 I, p0_d I).
EstimationOutcome estimate(const LtvSchedule& schedule, const Eigen::MatrixXd& phi, const TimeGrid& grid,
                           const Eigen::MatrixXd& measurements, const Eigen::VectorXd& q0, const EstimatorSpec& spec,
                           bool with_disturbance, const StateTrajectory* reference, const Eigen::VectorXd& volume);

/// Nearest-node temperatures at world-frame points over time, one row per time point.
Eigen::MatrixXd point_history(const std::vector<Eigen::Vector3d>& points, const Mesh& mesh,
                              const ParameterTrajectory& params, const std::vector<Eigen::VectorXd>& states);

// ---------------------------------------------------------------------------
// Subcommands. Each writes into `out_dir` and returns a short summary.

struct CommandSummary {
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> files;
  std::vector<std::string> warnings;

  double metric(const std::string& name) const;
};

CommandSummary cmd_simulate(const ExperimentConfig& config, const std::string& out_dir, std::uint64_t seed);
CommandSummary cmd_reduce(const ExperimentConfig& config, const std::string& out_dir);

struct EstimateOptions {
  std::string plant = "fom";  // "fom" or "external:PATH"
  bool disturbance_estimation = true;
};
CommandSummary cmd_estimate(const ExperimentConfig& config, const std::string& out_dir, std::uint64_t seed,
                            const EstimateOptions& options);

}  // namespace formtherm
