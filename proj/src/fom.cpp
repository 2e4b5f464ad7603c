// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/fom.hpp"

#include "formtherm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace formtherm {

SparseMatrix SystemMatrices::stiffness() const {
  SparseMatrix k = -conduction;
  for (Index i = 0; i < k.rows(); ++i) k.coeffRef(i, i) -= robin[i];
  return k;
}

SparseMatrix SystemMatrices::mass_matrix() const {
  SparseMatrix m(mass.size(), mass.size());
  m.reserve(Eigen::VectorXi::Constant(mass.size(), 1));
  for (Index i = 0; i < mass.size(); ++i) m.insert(i, i) = mass[i];
  m.makeCompressed();
  return m;
}

Eigen::VectorXd SensorSelection::apply(const Eigen::VectorXd& q) const {
  Eigen::VectorXd y(rows());
  for (Index j = 0; j < rows(); ++j) y[j] = q[nodes[static_cast<std::size_t>(j)]];
  return y;
}

Eigen::MatrixXd SensorSelection::apply_rows(const Eigen::MatrixXd& basis) const {
  Eigen::MatrixXd out(rows(), basis.cols());
  for (Index j = 0; j < rows(); ++j) out.row(j) = basis.row(nodes[static_cast<std::size_t>(j)]);
  return out;
}

SparseMatrix SensorSelection::to_sparse() const {
  SparseMatrix c(rows(), state_size);
  for (Index j = 0; j < rows(); ++j) c.insert(j, nodes[static_cast<std::size_t>(j)]) = 1.0;
  c.makeCompressed();
  return c;
}

DisturbanceSignal::DisturbanceSignal(Index dimension, std::vector<Segment> segments)
    : dimension_(dimension), segments_(std::move(segments)) {
  if (dimension_ < 1) throw ValidationError("disturbance dimension must be at least 1");
  for (const auto& s : segments_) {
    if (!(s.end > s.start)) throw ValidationError("disturbance segment must have end > start");
    if (s.value.size() != dimension_) throw ValidationError("disturbance segment has wrong dimension");
    if (!s.value.allFinite()) throw ValidationError("disturbance values must be finite");
  }
}

Eigen::VectorXd DisturbanceSignal::at(double t) const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dimension_);
  for (const auto& s : segments_)
    if (t >= s.start && t < s.end) d += s.value;
  return d;
}

// ---------------------------------------------------------------------------

FullOrderSystem::FullOrderSystem(Mesh mesh, MaterialModel material, FilmModel film,
                                 DisturbanceModel disturbance)
    : mesh_(std::move(mesh)),
      material_(std::move(material)),
      film_(film),
      disturbance_(std::move(disturbance)) {
  material_.validate();
  film_.validate();
  if (disturbance_.size() < 1) throw ValidationError("at least one disturbance channel is required");
  if (!(disturbance_.unit > 0.0)) throw ValidationError("disturbance unit must be positive");
  radius_ = reference_radius(mesh_);

  const Index n = mesh_.node_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(9 * mesh_.element_count() + n));
  for (const auto& t : mesh_.triangles)
    for (Index a : t)
      for (Index b : t) triplets.emplace_back(a, b, 1.0);
  for (Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
  pattern_.resize(n, n);
  pattern_.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.makeCompressed();

  auto slot = [&](Index row, Index col) {
    const auto* begin = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[col];
    const auto* end = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[col + 1];
    const auto* it = std::lower_bound(begin, end, static_cast<SparseMatrix::StorageIndex>(row));
    return static_cast<Index>(it - pattern_.innerIndexPtr());
  };
  scatter_.reserve(mesh_.triangles.size());
  for (const auto& t : mesh_.triangles) {
    std::array<Index, 9> s{};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) s[static_cast<std::size_t>(3 * a + b)] = slot(t[a], t[b]);
    scatter_.push_back(s);
  }
  diagonal_.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) diagonal_[static_cast<std::size_t>(i)] = slot(i, i);
}

SystemMatrices FullOrderSystem::assemble(const Eigen::VectorXd& q, const ParameterSlice& p) const {
  const Index n = size();
  if (q.size() != n || p.node_count() != n || p.displacement.rows() != n)
    throw ValidationError("state or parameter slice does not match the mesh");
  if (!q.allFinite()) throw NumericalError("non-finite temperature passed to assembly");

  const Points positions = mesh_.reference + p.displacement;
  const MeshGeometry geo = compute_geometry(mesh_, positions);

  SystemMatrices out;
  out.volume = geo.lumped_volume;
  out.mass.resize(n);
  out.robin.resize(n);
  out.load.resize(n);
  for (Index i = 0; i < n; ++i) {
    const MaterialProperties props = material_eval(material_, q[i]);
    out.mass[i] = material_.density * props.specific_heat * geo.lumped_volume[i];
    const double h = film_coefficient(film_, q[i], p.contact_temperature[i], p.tool_distance[i],
                                      p.contact_pressure[i]);
    out.robin[i] = h * (2.0 * geo.lumped_area[i] + (film_.rim_exchange ? geo.rim_area[i] : 0.0));
    out.load[i] = out.robin[i] * p.contact_temperature[i] + props.induced_heat * geo.lumped_volume[i];
  }

  out.conduction = pattern_;
  double* values = out.conduction.valuePtr();
  std::fill(values, values + out.conduction.nonZeros(), 0.0);
  const double s = mesh_.thickness;
  for (Index e = 0; e < mesh_.element_count(); ++e) {
    const auto& t = mesh_.triangles[static_cast<std::size_t>(e)];
    const Eigen::Vector3d p0 = positions.row(t[0]).transpose();
    const Eigen::Vector3d p1 = positions.row(t[1]).transpose();
    const Eigen::Vector3d p2 = positions.row(t[2]).transpose();
    // Edge opposite each vertex; grad N_a . grad N_b = e_a . e_b / (4 A^2).
    const std::array<Eigen::Vector3d, 3> edge{p2 - p1, p0 - p2, p1 - p0};
    const double mean_t = (q[t[0]] + q[t[1]] + q[t[2]]) / 3.0;
    const double coef = material_.conductivity(mean_t) * s / (4.0 * geo.element_area[e]);
    const auto& slots = scatter_[static_cast<std::size_t>(e)];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        values[slots[static_cast<std::size_t>(3 * a + b)]] += coef * edge[a].dot(edge[b]);
  }
  return out;
}

DisturbanceMatrix FullOrderSystem::disturbance_matrix(const ParameterSlice& p) const {
  const Index n = size();
  const Points positions = mesh_.reference + p.displacement;
  const MeshGeometry geo = compute_geometry(mesh_, positions);
  DisturbanceMatrix out;
  out.matrix = Eigen::MatrixXd::Zero(n, disturbance_.size());
  for (Index j = 0; j < disturbance_.size(); ++j) {
    const auto& region = disturbance_.regions[static_cast<std::size_t>(j)];
    bool any = false;
    for (Index i = 0; i < n; ++i) {
      bool inside = false;
      switch (region.kind) {
        case DisturbanceRegion::Kind::kContact: inside = p.tool_distance[i] <= film_.contact_threshold; break;
        case DisturbanceRegion::Kind::kAll: inside = true; break;
        case DisturbanceRegion::Kind::kRadialBand:
          inside = radius_[i] >= region.r_min && radius_[i] <= region.r_max;
          break;
      }
      if (inside) {
        out.matrix(i, j) = geo.lumped_volume[i] * disturbance_.unit;
        any = true;
      }
    }
    if (!any) out.empty_columns.push_back(j);
  }
  return out;
}

SensorSelection output_matrix(const SensorConfig& sensors, const Mesh& mesh, const Points& displacement) {
  sensors.validate();
  if (displacement.rows() != mesh.node_count()) throw ValidationError("displacement does not match mesh");
  SensorSelection c;
  c.state_size = mesh.node_count();
  c.nodes.reserve(sensors.positions.size());
  for (std::size_t j = 0; j < sensors.positions.size(); ++j) {
    const Eigen::RowVector3d target = sensors.positions[j].transpose();
    Index best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < mesh.node_count(); ++i) {
      const double d2 = (mesh.reference.row(i) + displacement.row(i) - target).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    if (std::sqrt(best_d2) > sensors.max_distance)
      throw ValidationError("sensor " + std::to_string(j) + " is off the part: nearest node is " +
                            std::to_string(std::sqrt(best_d2)) + " m away");
    c.nodes.push_back(best);
  }
  return c;
}

// ---------------------------------------------------------------------------

FomStepper::FomStepper(const FullOrderSystem& system) : system_(system), lhs_(system.pattern()) {}

Eigen::VectorXd FomStepper::step(const SystemMatrices& sys, const Eigen::VectorXd& q, double h,
                                 const Eigen::VectorXd& injected_power) {
  if (!(h > 0.0)) throw ValidationError("step size must be positive");
  const Index n = q.size();
  // lhs = M - h K = diag(mass + h robin) + h conduction, on the shared pattern.
  const double* cond = sys.conduction.valuePtr();
  double* values = lhs_.valuePtr();
  for (Index s = 0; s < lhs_.nonZeros(); ++s) values[s] = h * cond[s];
  for (Index i = 0; i < n; ++i) lhs_.coeffRef(i, i) += sys.mass[i] + h * sys.robin[i];

  if (!analyzed_) {
    solver_.analyzePattern(lhs_);
    analyzed_ = true;
  }
  solver_.factorize(lhs_);
  if (solver_.info() != Eigen::Success) throw NumericalError("FOM step matrix is singular");

  const Eigen::VectorXd rhs = sys.mass.cwiseProduct(q) + h * (sys.load + injected_power);
  Eigen::VectorXd next = solver_.solve(rhs);
  const double residual = (lhs_ * next - rhs).norm();
  if (!next.allFinite() || residual > 1e-10 * std::max(1.0, rhs.norm()))
    throw NumericalError("FOM step solve did not converge (residual " + std::to_string(residual) + ")");
  return next;
}

Eigen::VectorXd FomStepper::step(const Eigen::VectorXd& q, const ParameterSlice& p, double h,
                                 const Eigen::VectorXd& d) {
  const SystemMatrices sys = system_.assemble(q, p);
  Eigen::VectorXd power = Eigen::VectorXd::Zero(q.size());
  if (d.size() > 0 && !d.isZero(0.0)) {
    if (d.size() != system_.disturbance().size()) throw ValidationError("disturbance has wrong dimension");
    power = system_.disturbance_matrix(p).matrix * d;
  }
  return step(sys, q, h, power);
}

Eigen::VectorXd step_fom(const FullOrderSystem& system, const Eigen::VectorXd& q, const ParameterSlice& p,
                         double h, const Eigen::VectorXd& d) {
  FomStepper stepper(system);
  return stepper.step(q, p, h, d);
}

StateTrajectory simulate_fom(const FullOrderSystem& system, const ScenarioRun& run, const SensorConfig& sensors,
                             const DisturbanceSignal& disturbance) {
  const Index n_t = run.grid.steps();
  if (run.parameters.size() != n_t + 1) throw ValidationError("parameter trajectory does not cover the grid");
  if (disturbance.dimension() != system.disturbance().size())
    throw ValidationError("disturbance signal dimension does not match the disturbance model");

  StateTrajectory traj;
  traj.temperatures.reserve(static_cast<std::size_t>(n_t + 1));
  traj.temperatures.push_back(Eigen::VectorXd::Constant(system.size(), run.inputs.t_aust_avg));
  traj.readings.resize(n_t + 1, sensors.count());

  FomStepper stepper(system);
  for (Index k = 0; k <= n_t; ++k) {
    const ParameterSlice& p = run.parameters[k];
    traj.readings.row(k) = output_matrix(sensors, system.mesh(), p.displacement).apply(traj[k]).transpose();
    if (k == n_t) break;
    traj.temperatures.push_back(stepper.step(traj[k], p, run.grid.step_size(k), disturbance.at(run.grid.time(k))));
  }
  return traj;
}

double rmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& reference, const Eigen::VectorXd& volume) {
  if (estimate.size() != reference.size() || volume.size() != reference.size())
    throw ValidationError("rmse: dimension mismatch");
  return volume.dot((estimate - reference).cwiseAbs()) / volume.sum();
}

}  // namespace formtherm
