// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/ltv.hpp"

#include "formtherm/container.hpp"
#include "formtherm/error.hpp"

#include <Eigen/Eigenvalues>

namespace formtherm {

void LtvSchedule::validate() const {
  if (entries.empty()) throw ValidationError("LTV schedule is empty");
  if (static_cast<Index>(entries.size()) != steps() + 1)
    throw ValidationError("LTV schedule needs one entry per time point (" + std::to_string(steps() + 1) + "), has " +
                          std::to_string(entries.size()));
  const Index r = rank();
  const Index nd = disturbances();
  const Index m = outputs();
  for (Index k = 0; k <= steps(); ++k) {
    const auto& e = (*this)[k];
    if (e.mass.rows() != r || e.mass.cols() != r || e.stiffness.rows() != r || e.stiffness.cols() != r ||
        e.load.size() != r || e.disturbance.rows() != r || e.disturbance.cols() != nd || e.output.rows() != m ||
        e.output.cols() != r)
      throw FormatError("LTV schedule entry has inconsistent shapes", k);
  }
  for (double h : step_sizes)
    if (!(h > 0.0)) throw ValidationError("LTV schedule step sizes must be positive");
}

LtvSchedule build_ltv_schedule(const ReducedSystem& rom, const ScenarioRun& supporting,
                               const StateTrajectory& supporting_states, const std::string& id) {
  const Index n_t = supporting.grid.steps();
  if (supporting.parameters.size() != n_t + 1 || supporting_states.size() != n_t + 1)
    throw ValidationError("supporting run is missing steps: expected " + std::to_string(n_t + 1) + " time points");
  LtvSchedule s;
  s.supporting_id = id;
  s.step_sizes = supporting.grid.step_sizes();
  s.entries.reserve(static_cast<std::size_t>(n_t + 1));
  s.mass_condition.reserve(static_cast<std::size_t>(n_t + 1));
  for (Index k = 0; k <= n_t; ++k) {
    s.entries.push_back(rom.assemble_full(supporting_states[k], supporting.parameters[k]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.entries.back().mass, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (!(lo > 0.0)) throw NumericalError("reduced mass matrix is not positive definite at step " + std::to_string(k));
    s.mass_condition.push_back(eig.eigenvalues().maxCoeff() / lo);
  }
  return s;
}

void save_ltv_schedule(const std::string& path, const LtvSchedule& schedule) {
  schedule.validate();
  const Index r = schedule.rank();
  const Index nd = schedule.disturbances();
  const Index m = schedule.outputs();
  ContainerHeader h;
  h.kind = "ltv_schedule";
  h.set("supporting", schedule.supporting_id.empty() ? std::string("unnamed") : schedule.supporting_id);
  h.set("rank", static_cast<long>(r));
  h.set("disturbances", static_cast<long>(nd));
  h.set("sensors", static_cast<long>(m));
  h.statics = {{"step_sizes", schedule.steps(), 1}, {"mass_condition", schedule.steps() + 1, 1}};
  h.steps = schedule.steps() + 1;
  h.fields = {{"mass", r, r}, {"stiffness", r, r}, {"load", r, 1}, {"disturbance", r, nd}, {"output", m, r}};
  ContainerWriter w(path, h);
  w.write_static(Eigen::Map<const Eigen::VectorXd>(schedule.step_sizes.data(), schedule.steps()));
  w.write_static(Eigen::Map<const Eigen::VectorXd>(schedule.mass_condition.data(), schedule.steps() + 1));
  for (const auto& e : schedule.entries) {
    w.write_field(e.mass);
    w.write_field(e.stiffness);
    w.write_field(e.load);
    w.write_field(e.disturbance);
    w.write_field(e.output);
  }
  w.finish();
}

LtvSchedule load_ltv_schedule(const std::string& path) {
  ContainerReader reader(path);
  const ContainerHeader& h = reader.header();
  if (h.kind != "ltv_schedule") throw FormatError("'" + path + "' is a " + h.kind + ", not an ltv_schedule");
  const std::vector<std::string> names{"mass", "stiffness", "load", "disturbance", "output"};
  if (h.fields.size() != names.size() || h.statics.size() != 2)
    throw FormatError("'" + path + "' has an unexpected ltv_schedule layout");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (h.fields[i].name != names[i]) throw FormatError("'" + path + "' field " + std::to_string(i) + " is not " + names[i]);
  LtvSchedule s;
  s.supporting_id = h.get("supporting");
  const Eigen::VectorXd steps = reader.read_static();
  const Eigen::VectorXd cond = reader.read_static();
  s.step_sizes.assign(steps.data(), steps.data() + steps.size());
  s.mass_condition.assign(cond.data(), cond.data() + cond.size());
  s.entries.resize(static_cast<std::size_t>(h.steps));
  for (auto& e : s.entries) {
    e.mass = reader.read_field();
    e.stiffness = reader.read_field();
    e.load = reader.read_field();
    e.disturbance = reader.read_field();
    e.output = reader.read_field();
  }
  reader.expect_end();
  s.validate();
  return s;
}

ReducedTrajectory simulate_rom(const LtvSchedule& schedule, const TimeGrid& grid, const Eigen::VectorXd& x0,
                               const DisturbanceSignal& disturbance) {
  if (grid.steps() != schedule.steps())
    throw ValidationError("grid has " + std::to_string(grid.steps()) + " steps, schedule " +
                          std::to_string(schedule.steps()));
  if (x0.size() != schedule.rank()) throw ValidationError("initial reduced state has wrong dimension");
  if (!disturbance.empty() && disturbance.dimension() != schedule.disturbances())
    throw ValidationError("disturbance dimension does not match the schedule");
  ReducedTrajectory out;
  out.states.reserve(static_cast<std::size_t>(grid.steps() + 1));
  out.states.push_back(x0);
  Eigen::VectorXd none;
  for (Index k = 0; k < grid.steps(); ++k) {
    const Eigen::VectorXd d = disturbance.empty() ? none : disturbance.at(grid.time(k));
    out.states.push_back(step_reduced(schedule[k], out[k], grid.step_size(k), d));
  }
  return out;
}

Eigen::MatrixXd rom_outputs(const LtvSchedule& schedule, const ReducedTrajectory& traj) {
  Eigen::MatrixXd y(traj.size(), schedule.outputs());
  for (Index k = 0; k < traj.size(); ++k) y.row(k) = (schedule[k].output * traj[k]).transpose();
  return y;
}

}  // namespace formtherm
