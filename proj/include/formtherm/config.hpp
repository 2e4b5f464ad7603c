// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/fom.hpp"
#include "formtherm/pod.hpp"
#include "formtherm/property.hpp"
#include "formtherm/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace formtherm {

/// Scenario file: geometry, tooling, reference inputs, sensors and the
/// thermal model parameters.
struct ScenarioConfig {
  std::string path;
  Scenario scenario;  // mesh already built
  MaterialModel material;
  FilmModel film;
  DisturbanceModel disturbance;
};

/// A FOM run request: inputs plus an optional injected disturbance.
struct RunSpec {
  std::string id;
  ProcessInputs inputs;
  DisturbanceSignal disturbance;
  std::string description = "none";  // provenance tag of the disturbance
};

struct SweepSpec {
  std::vector<double> t_aust_avg;
  std::vector<double> v_punch;
  std::vector<double> t_hold;

  /// Cartesian product in the order t_aust_avg, v_punch, t_hold.
  std::vector<RunSpec> expand() const;
};

struct RomSpec {
  BasisRule rule = BasisRule::fixed(30);
  std::vector<Index> ranks{10, 30, 50};  // error-curve ranks
  Index stride = 1;
};

struct EstimatorSpec {
  double q_w = 10.0;
  double r_v = 0.1;
  double p0 = 10.0;
  double q_d = 100.0;   // random-walk variance of d per step
  double p0_d = 1.0e4;  // initial variance of d
  bool joseph = false;
};

/// Plant of an estimation experiment. `induced_heat`, when set, replaces the
/// material's g(T) in the plant only (a source the ROM does not know).
struct PlantSpec {
  RunSpec run;
  std::optional<PiecewiseLinear> induced_heat;
};

struct EvaluationSpec {
  std::string speed_scenario;   // scenario at n ~ 1e4 for the speed-up check
  Index speed_rank = 30;
  int speed_repeats = 3;
  std::string reproducibility_experiment;  // small experiment rerun for byte equality
  std::optional<PlantSpec> latent_plant;   // plant with an unmodelled latent-heat source
  double pulse_start = 9.0;                // window of the known pulse [s]
  double pulse_end = 11.0;
  double pulse_value = 1000.0;
};

struct ExperimentConfig {
  std::string path;
  std::string name = "experiment";
  ScenarioConfig scenario;
  SweepSpec sweep;
  std::vector<RunSpec> excitation;
  RomSpec rom;
  EstimatorSpec estimator;
  PlantSpec plant;
  std::vector<Eigen::Vector3d> evaluation_points;
  CoolingRateRule property;
  EvaluationSpec evaluation;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency

  /// Supporting inputs are the scenario's reference inputs.
  const ProcessInputs& supporting() const { return scenario.scenario.reference; }
};

ScenarioConfig load_scenario_config(const std::string& path);
ExperimentConfig load_experiment_config(const std::string& path);

/// Disturbance signal from [{"start": s, "end": e, "value": v or [v...]}].
DisturbanceSignal parse_disturbance_signal(const std::string& json_text, Index dimension);

}  // namespace formtherm
