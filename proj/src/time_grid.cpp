// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/time_grid.hpp"

#include "formtherm/error.hpp"

#include <algorithm>
#include <cmath>

namespace formtherm {

void ProcessInputs::validate() const {
  if (!(t_aust_avg > 0.0) || !std::isfinite(t_aust_avg))
    throw ValidationError("austenitizing temperature must be positive");
  if (!(v_punch > 0.0) || !std::isfinite(v_punch))
    throw ValidationError("punch speed must be positive");
  if (!(t_hold >= 0.0) || !std::isfinite(t_hold))
    throw ValidationError("holding time must be non-negative");
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::kTransfer: return "transfer";
    case Phase::kForming: return "forming";
    case Phase::kHolding: return "holding";
    case Phase::kDemoulding: return "demoulding";
  }
  return "unknown";
}

Phase phase_from_string(const std::string& name) {
  for (Phase p : {Phase::kTransfer, Phase::kForming, Phase::kHolding, Phase::kDemoulding})
    if (to_string(p) == name) return p;
  throw ValidationError("unknown process phase '" + name + "'");
}

PhaseTemplate make_phase_template(const std::vector<PhaseBlock>& blocks) {
  PhaseTemplate tpl;
  for (const auto& b : blocks) {
    if (b.steps < 0) throw ValidationError("phase step count must be non-negative");
    if (b.steps > 0 && !(b.duration > 0.0))
      throw ValidationError("phase '" + to_string(b.phase) + "' needs a positive duration");
    for (Index i = 0; i < b.steps; ++i) {
      tpl.step_durations.push_back(b.duration / static_cast<double>(b.steps));
      tpl.phases.push_back(b.phase);
    }
  }
  return tpl;
}

PhaseTemplate hole_flanging_template() {
  return make_phase_template({{Phase::kTransfer, 150, 5.5},
                              {Phase::kForming, 130, 1.5},
                              {Phase::kHolding, 130, 4.0},
                              {Phase::kDemoulding, 100, 2.0}});
}

TimeGrid::TimeGrid(std::vector<double> step_sizes, std::vector<Phase> phases)
    : h_(std::move(step_sizes)), phases_(std::move(phases)) {
  if (h_.size() != phases_.size()) throw ValidationError("time grid phases do not match step count");
  if (h_.empty()) throw ValidationError("time grid needs at least one step");
  t_.reserve(h_.size() + 1);
  t_.push_back(0.0);
  for (std::size_t k = 0; k < h_.size(); ++k) {
    if (!(h_[k] > 0.0) || !std::isfinite(h_[k]))
      throw ValidationError("step size " + std::to_string(k) + " must be positive");
    const double next = t_.back() + h_[k];
    if (!(next > t_.back())) throw ValidationError("time grid is not strictly increasing");
    t_.push_back(next);
  }
}

Index TimeGrid::first_step(Phase phase) const {
  auto it = std::find(phases_.begin(), phases_.end(), phase);
  return it == phases_.end() ? steps() : static_cast<Index>(it - phases_.begin());
}

Index TimeGrid::step_count(Phase phase) const {
  return static_cast<Index>(std::count(phases_.begin(), phases_.end(), phase));
}

double TimeGrid::duration(Phase phase) const {
  double total = 0.0;
  for (std::size_t k = 0; k < h_.size(); ++k)
    if (phases_[k] == phase) total += h_[k];
  return total;
}

TimeGrid build_time_grid(Index n_t, const ProcessInputs& u, const ProcessInputs& u_ref,
                         const PhaseTemplate& tpl) {
  u.validate();
  u_ref.validate();
  if (n_t != tpl.size())
    throw ValidationError("step count " + std::to_string(n_t) + " does not match template length " +
                          std::to_string(tpl.size()));
  if (tpl.phases.size() != tpl.step_durations.size())
    throw ValidationError("phase template labels do not match durations");

  const double forming_scale = u_ref.v_punch / u.v_punch;
  const bool has_holding = std::count(tpl.phases.begin(), tpl.phases.end(), Phase::kHolding) > 0;
  double holding_scale = 1.0;
  if (has_holding) {
    if (!(u_ref.t_hold > 0.0)) throw ValidationError("reference holding time must be positive");
    if (!(u.t_hold > 0.0))
      throw ValidationError("holding time must be positive when the template has holding steps");
    holding_scale = u.t_hold / u_ref.t_hold;
  }

  std::vector<double> h(tpl.step_durations);
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (tpl.phases[k] == Phase::kForming) h[k] *= forming_scale;
    if (tpl.phases[k] == Phase::kHolding) h[k] *= holding_scale;
  }
  return TimeGrid(std::move(h), tpl.phases);
}

}  // namespace formtherm
