// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/material.hpp"
#include "formtherm/mesh.hpp"
#include "formtherm/scenario.hpp"
#include "formtherm/trajectory.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace formtherm {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Where a disturbance channel injects power.
struct DisturbanceRegion {
  enum class Kind { kContact, kAll, kRadialBand };
  Kind kind = Kind::kContact;
  double r_min = 0.0;  // reference radius bounds for kRadialBand [m]
  double r_max = 0.0;

  static DisturbanceRegion contact() { return {}; }
  static DisturbanceRegion all() { return {Kind::kAll, 0.0, 0.0}; }
  static DisturbanceRegion band(double r_min, double r_max) { return {Kind::kRadialBand, r_min, r_max}; }
};

/// Disturbance channels. Each entry of d is a power density expressed in
/// multiples of `unit` [W/m^3].
struct DisturbanceModel {
  std::vector<DisturbanceRegion> regions{DisturbanceRegion::contact()};
  double unit = 1.0;

  Index size() const { return static_cast<Index>(regions.size()); }
};

/// Semi-discrete system M(q,p) qdot = K(q,p) q + b(q,p) + E(p) d with lumped M.
/// K = -(conduction) - diag(robin).
struct SystemMatrices {
  Eigen::VectorXd mass;     // diagonal of M [J/K]
  SparseMatrix conduction;  // symmetric conduction matrix [W/K]
  Eigen::VectorXd robin;    // h * exchange area per node [W/K]
  Eigen::VectorXd load;     // b [W]
  Eigen::VectorXd volume;   // deformed lumped nodal volumes [m^3]

  SparseMatrix stiffness() const;
  SparseMatrix mass_matrix() const;
};

struct DisturbanceMatrix {
  Eigen::MatrixXd matrix;                // E, n x n_d [W per unit of d]
  std::vector<Index> empty_columns;      // regions with no node at this step
};

/// Row j selects the node observed by sensor j.
struct SensorSelection {
  std::vector<Index> nodes;
  Index state_size = 0;

  Index rows() const { return static_cast<Index>(nodes.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& q) const;
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& basis) const;  // C * basis
  SparseMatrix to_sparse() const;
};

/// Piecewise-constant disturbance signal: the sum of all segments active at t,
/// each active on [start, end).
class DisturbanceSignal {
public:
  struct Segment {
    double start;
    double end;
    Eigen::VectorXd value;
  };

  DisturbanceSignal() = default;
  explicit DisturbanceSignal(Index dimension) : dimension_(dimension) {}
  DisturbanceSignal(Index dimension, std::vector<Segment> segments);

  static DisturbanceSignal pulse(double start, double end, double value) {
    return DisturbanceSignal(1, {{start, end, Eigen::VectorXd::Constant(1, value)}});
  }

  Index dimension() const { return dimension_; }
  const std::vector<Segment>& segments() const { return segments_; }
  Eigen::VectorXd at(double t) const;
  bool empty() const { return segments_.empty(); }

private:
  Index dimension_ = 1;
  std::vector<Segment> segments_;
};

/// Full-order finite-element heat model on the deforming sheet.
class FullOrderSystem {
public:
  FullOrderSystem(Mesh mesh, MaterialModel material, FilmModel film, DisturbanceModel disturbance = {});

  const Mesh& mesh() const { return mesh_; }
  const MaterialModel& material() const { return material_; }
  const FilmModel& film() const { return film_; }
  const DisturbanceModel& disturbance() const { return disturbance_; }
  Index size() const { return mesh_.node_count(); }

  /// Assembles M, K, b at nodal temperatures q on the configuration given by
  /// the parameter slice (node positions X0 + d).
  SystemMatrices assemble(const Eigen::VectorXd& q, const ParameterSlice& p) const;

  /// E at the configuration of the slice.
  DisturbanceMatrix disturbance_matrix(const ParameterSlice& p) const;

  /// Sparsity pattern shared by every assembled conduction matrix (includes the diagonal).
  const SparseMatrix& pattern() const { return pattern_; }

private:
  Mesh mesh_;
  MaterialModel material_;
  FilmModel film_;
  DisturbanceModel disturbance_;
  Eigen::VectorXd radius_;
  SparseMatrix pattern_;
  std::vector<std::array<Index, 9>> scatter_;  // element-local (a,b) -> value slot
  std::vector<Index> diagonal_;                // node -> value slot of (i,i)
};

/// Nearest-node sensor mapping at the deformed configuration X0 + d. Throws
/// ValidationError when a sensor is farther than max_distance from every node.
SensorSelection output_matrix(const SensorConfig& sensors, const Mesh& mesh, const Points& displacement);

/// Linearly implicit Euler step with coefficients frozen at (q_k, p_k):
///   (M - h K) q_{k+1} = M q_k + h (b + E d).
/// Keeps the symbolic factorisation of the shared pattern across steps.
class FomStepper {
public:
  explicit FomStepper(const FullOrderSystem& system);

  Eigen::VectorXd step(const Eigen::VectorXd& q, const ParameterSlice& p, double h,
                       const Eigen::VectorXd& d);
  /// Step with pre-assembled matrices (d enters through E).
  Eigen::VectorXd step(const SystemMatrices& sys, const Eigen::VectorXd& q, double h,
                       const Eigen::VectorXd& injected_power);

private:
  const FullOrderSystem& system_;
  SparseMatrix lhs_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
  bool analyzed_ = false;
};

/// Free-function form of a single FOM step.
Eigen::VectorXd step_fom(const FullOrderSystem& system, const Eigen::VectorXd& q, const ParameterSlice& p,
                         double h, const Eigen::VectorXd& d);

/// Runs the FOM over the whole grid from the homogeneous initial state
/// q_0 = T_aust * 1, recording noiseless sensor readings at every time point.
StateTrajectory simulate_fom(const FullOrderSystem& system, const ScenarioRun& run, const SensorConfig& sensors,
                             const DisturbanceSignal& disturbance);

/// Volume-weighted mean absolute nodal error [K].
double rmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& reference, const Eigen::VectorXd& volume);

}  // namespace formtherm
