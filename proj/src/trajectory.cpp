// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/trajectory.hpp"

#include "formtherm/container.hpp"
#include "formtherm/csv.hpp"
#include "formtherm/error.hpp"

#include <cmath>

namespace formtherm {

namespace {

constexpr const char* kParameterKind = "parameter_trajectory";
constexpr const char* kStateKind = "state_trajectory";

void check_finite(const Eigen::Ref<const RowMajorMatrix>& values, const std::string& field, Index step) {
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (!std::isfinite(values(i, j)))
        throw FormatError("non-finite value in field '" + field + "'", step, i);
    }
  }
}

void expect_counts(const ContainerHeader& h, std::optional<Index> nodes, std::optional<Index> points) {
  if (nodes && h.get_long("nodes") != *nodes)
    throw FormatError("node count " + h.get("nodes") + " does not match the mesh (" +
                      std::to_string(*nodes) + ")");
  if (points && h.steps != *points)
    throw FormatError("step count " + std::to_string(h.steps) + " does not match the time grid (" +
                      std::to_string(*points) + " time points)");
}

}  // namespace

ParameterSlice ParameterSlice::zeros(Index nodes) {
  ParameterSlice s;
  s.displacement = Points::Zero(nodes, 3);
  s.tool_distance = Eigen::VectorXd::Zero(nodes);
  s.contact_pressure = Eigen::VectorXd::Zero(nodes);
  s.contact_temperature = Eigen::VectorXd::Zero(nodes);
  return s;
}

void ParameterTrajectory::validate(std::optional<Index> nodes, std::optional<Index> points) const {
  if (slices.empty()) throw FormatError("parameter trajectory is empty");
  if (points && size() != *points)
    throw FormatError("parameter trajectory has " + std::to_string(size()) + " time points, grid has " +
                      std::to_string(*points));
  const Index n = nodes.value_or(node_count());
  for (Index k = 0; k < size(); ++k) {
    const auto& s = slices[static_cast<std::size_t>(k)];
    if (s.displacement.rows() != n || s.tool_distance.size() != n || s.contact_pressure.size() != n ||
        s.contact_temperature.size() != n)
      throw FormatError("parameter slice shape does not match node count " + std::to_string(n), k);
    for (Index i = 0; i < n; ++i) {
      const double delta = s.tool_distance[i], p = s.contact_pressure[i], t_inf = s.contact_temperature[i];
      if (!s.displacement.row(i).allFinite() || !std::isfinite(delta) || !std::isfinite(p) ||
          !std::isfinite(t_inf))
        throw FormatError("non-finite parameter value", k, i);
      if (delta < 0.0) throw FormatError("negative tool distance", k, i);
      if (p < 0.0) throw FormatError("negative contact pressure", k, i);
      if (p > 0.0 && delta != 0.0) throw FormatError("contact pressure without contact", k, i);
      if (!(t_inf > 0.0)) throw FormatError("non-positive contact temperature", k, i);
    }
  }
}

void save_parameter_trajectory(const std::string& path, const ParameterTrajectory& traj) {
  const Index n = traj.node_count();
  ContainerHeader h;
  h.kind = kParameterKind;
  h.set("nodes", static_cast<long>(n));
  h.steps = traj.size();
  h.fields = {{"displacement", n, 3}, {"tool_distance", n, 1}, {"contact_pressure", n, 1},
              {"contact_temperature", n, 1}};
  ContainerWriter w(path, h);
  for (const auto& s : traj.slices) {
    w.write_field(s.displacement);
    w.write_field(s.tool_distance);
    w.write_field(s.contact_pressure);
    w.write_field(s.contact_temperature);
  }
  w.finish();
}

ParameterTrajectory load_parameter_trajectory(const std::string& path, std::optional<Index> nodes,
                                              std::optional<Index> points) {
  ContainerReader r(path);
  const ContainerHeader& h = r.header();
  if (h.kind != kParameterKind) throw FormatError("'" + path + "' holds a " + h.kind + ", not a parameter trajectory");
  expect_counts(h, nodes, points);
  const Index n = h.get_long("nodes");
  const char* names[] = {"displacement", "tool_distance", "contact_pressure", "contact_temperature"};
  if (h.fields.size() != 4) throw FormatError("parameter trajectory must declare 4 fields");
  for (std::size_t f = 0; f < 4; ++f) {
    const auto& spec = h.fields[f];
    const long cols = f == 0 ? 3 : 1;
    if (spec.name != names[f] || spec.rows != n || spec.cols != cols)
      throw FormatError("unexpected field declaration '" + spec.name + "'");
  }

  ParameterTrajectory traj;
  traj.slices.reserve(static_cast<std::size_t>(h.steps));
  for (Index k = 0; k < h.steps; ++k) {
    ParameterSlice s;
    RowMajorMatrix d = r.read_field();
    check_finite(d, "displacement", k);
    s.displacement = d;
    for (int f = 1; f < 4; ++f) {
      RowMajorMatrix v = r.read_field();
      check_finite(v, names[f], k);
      Eigen::VectorXd col = v.col(0);
      if (f == 1) s.tool_distance = std::move(col);
      if (f == 2) s.contact_pressure = std::move(col);
      if (f == 3) s.contact_temperature = std::move(col);
    }
    traj.slices.push_back(std::move(s));
  }
  r.expect_end();
  traj.validate(n, h.steps);
  return traj;
}

void export_parameter_csv(const std::string& path, const ParameterTrajectory& traj,
                          const std::vector<double>& times, const std::vector<Index>& nodes) {
  if (static_cast<Index>(times.size()) != traj.size())
    throw ValidationError("time vector does not match parameter trajectory length");
  CsvWriter csv(path,
                {"parameter trajectory (mechanical solution) at selected nodes",
                 "units: t [s], d [m], delta [m], p_N [Pa], T_inf [K]"},
                {"step", "t", "node", "d_x", "d_y", "d_z", "delta", "p_N", "T_inf"});
  for (Index k = 0; k < traj.size(); ++k) {
    const auto& s = traj[k];
    for (Index i : nodes) {
      csv.row({static_cast<double>(k), times[static_cast<std::size_t>(k)], static_cast<double>(i),
               s.displacement(i, 0), s.displacement(i, 1), s.displacement(i, 2), s.tool_distance[i],
               s.contact_pressure[i], s.contact_temperature[i]});
    }
  }
  csv.close();
}

void save_state_trajectory(const std::string& path, const StateTrajectory& traj) {
  if (traj.temperatures.empty()) throw ValidationError("cannot save an empty state trajectory");
  const Index n = traj.temperatures.front().size();
  const Index m = traj.readings.cols();
  if (m > 0 && traj.readings.rows() != traj.size())
    throw ValidationError("sensor readings do not match trajectory length");
  ContainerHeader h;
  h.kind = kStateKind;
  h.set("nodes", static_cast<long>(n));
  h.set("sensors", static_cast<long>(m));
  h.steps = traj.size();
  h.fields = {{"temperature", n, 1}};
  if (m > 0) h.fields.push_back({"readings", 1, m});
  ContainerWriter w(path, h);
  for (Index k = 0; k < traj.size(); ++k) {
    if (traj[k].size() != n) throw ValidationError("state vectors have inconsistent sizes");
    w.write_field(traj[k]);
    if (m > 0) w.write_field(traj.readings.row(k));
  }
  w.finish();
}

StateTrajectory load_state_trajectory(const std::string& path, std::optional<Index> nodes,
                                      std::optional<Index> points) {
  ContainerReader r(path);
  const ContainerHeader& h = r.header();
  if (h.kind != kStateKind) throw FormatError("'" + path + "' holds a " + h.kind + ", not a state trajectory");
  expect_counts(h, nodes, points);
  const Index n = h.get_long("nodes");
  const Index m = h.has("sensors") ? h.get_long("sensors") : 0;
  if (h.fields.empty() || h.fields[0].name != "temperature" || h.fields[0].rows != n)
    throw FormatError("state trajectory must start with a temperature field");
  if (m > 0 && (h.fields.size() != 2 || h.fields[1].name != "readings" || h.fields[1].cols != m))
    throw FormatError("state trajectory readings field is malformed");

  StateTrajectory traj;
  traj.temperatures.reserve(static_cast<std::size_t>(h.steps));
  if (m > 0) traj.readings.resize(h.steps, m);
  for (Index k = 0; k < h.steps; ++k) {
    RowMajorMatrix q = r.read_field();
    check_finite(q, "temperature", k);
    traj.temperatures.emplace_back(q.col(0));
    if (m > 0) {
      RowMajorMatrix y = r.read_field();
      check_finite(y, "readings", k);
      traj.readings.row(k) = y.row(0);
    }
  }
  r.expect_end();
  return traj;
}

}  // namespace formtherm
