// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace formtherm {

using Index = Eigen::Index;

/// Controllable process inputs of the forming stage.
struct ProcessInputs {
  double t_aust_avg = 1273.0;  // average austenitizing temperature [K]
  double v_punch = 80.0;       // punch speed [mm/s]
  double t_hold = 4.0;         // holding time at bottom dead centre [s]

  /// Throws ValidationError unless t_aust_avg > 0, v_punch > 0, t_hold >= 0.
  void validate() const;
};

enum class Phase { kTransfer, kForming, kHolding, kDemoulding };

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& name);

/// Nominal per-step durations and phase labels, valid for the reference inputs.
struct PhaseTemplate {
  std::vector<double> step_durations;  // [s]
  std::vector<Phase> phases;

  Index size() const { return static_cast<Index>(step_durations.size()); }
};

/// Uniform steps within each phase: (phase, step count, phase duration [s]).
struct PhaseBlock {
  Phase phase;
  Index steps;
  double duration;
};
PhaseTemplate make_phase_template(const std::vector<PhaseBlock>& blocks);

/// Hole-flanging stage: 510 steps split 150/130/130/100 over transfer (5.5 s),
/// forming (1.5 s at 80 mm/s), holding (4.0 s) and demoulding (2.0 s).
PhaseTemplate hole_flanging_template();

/// Non-uniform time grid with a fixed number of steps. Step k advances from
/// time(k) to time(k + 1) = time(k) + step_size(k).
class TimeGrid {
public:
  TimeGrid() = default;
  TimeGrid(std::vector<double> step_sizes, std::vector<Phase> phases);

  Index steps() const { return static_cast<Index>(h_.size()); }
  double step_size(Index k) const { return h_[static_cast<std::size_t>(k)]; }
  double time(Index k) const { return t_[static_cast<std::size_t>(k)]; }
  Phase phase(Index k) const { return phases_[static_cast<std::size_t>(k)]; }
  double end_time() const { return t_.back(); }

  const std::vector<double>& step_sizes() const { return h_; }
  const std::vector<double>& times() const { return t_; }
  const std::vector<Phase>& phases() const { return phases_; }

  /// First step of the phase and its number of steps (count 0 if absent).
  Index first_step(Phase phase) const;
  Index step_count(Phase phase) const;
  /// Total duration of the phase [s].
  double duration(Phase phase) const;

private:
  std::vector<double> h_;
  std::vector<double> t_;
  std::vector<Phase> phases_;
};

/// Scales the template to the actual inputs: forming steps by
/// v_punch_ref / v_punch, holding steps by t_hold / t_hold_ref, other phases
/// unchanged. The step count never depends on the inputs.
TimeGrid build_time_grid(Index n_t, const ProcessInputs& u, const ProcessInputs& u_ref,
                         const PhaseTemplate& phase_template);

}  // namespace formtherm
