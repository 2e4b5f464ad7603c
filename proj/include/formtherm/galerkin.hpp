// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/fom.hpp"

#include <Eigen/Core>

namespace formtherm {

/// Projected matrices Phi^T M Phi, Phi^T K Phi, Phi^T b, Phi^T E and C Phi.
struct ReducedMatrices {
  Eigen::MatrixXd mass;         // r x r
  Eigen::MatrixXd stiffness;    // r x r
  Eigen::VectorXd load;         // r
  Eigen::MatrixXd disturbance;  // r x n_d
  Eigen::MatrixXd output;       // m x r
};

ReducedMatrices project_matrices(const Eigen::MatrixXd& phi, const SystemMatrices& sys,
                                 const DisturbanceMatrix& e, const SensorSelection& c);

/// Semi-implicit Euler on the reduced system:
///   (M_r - h K_r) x+ = M_r x + h (b_r + E_r d).
/// Throws NumericalError when the step matrix is ill-conditioned.
Eigen::VectorXd step_reduced(const ReducedMatrices& red, const Eigen::VectorXd& x, double h,
                             const Eigen::VectorXd& d);

/// Galerkin ROM obtained by lifting, assembling the FOM and projecting.
class ReducedSystem {
public:
  ReducedSystem(const FullOrderSystem& system, Eigen::MatrixXd phi, SensorConfig sensors);

  Index rank() const { return phi_.cols(); }
  const Eigen::MatrixXd& basis() const { return phi_; }
  const FullOrderSystem& system() const { return system_; }
  const SensorConfig& sensors() const { return sensors_; }

  Eigen::VectorXd lift(const Eigen::VectorXd& x) const { return phi_ * x; }
  Eigen::VectorXd project(const Eigen::VectorXd& q) const { return phi_.transpose() * q; }

  /// Reduced matrices with coefficients evaluated at the full state q.
  ReducedMatrices assemble_full(const Eigen::VectorXd& q, const ParameterSlice& p) const;
  /// Reduced matrices at the lifted state Phi x.
  ReducedMatrices assemble(const Eigen::VectorXd& x, const ParameterSlice& p) const {
    return assemble_full(lift(x), p);
  }

  /// One nonlinear ROM step with coefficients frozen at Phi x.
  Eigen::VectorXd step(const Eigen::VectorXd& x, const ParameterSlice& p, double h, const Eigen::VectorXd& d) const;

private:
  const FullOrderSystem& system_;
  Eigen::MatrixXd phi_;
  SensorConfig sensors_;
};

/// Reduced trajectory x_0 .. x_{n_t}.
struct ReducedTrajectory {
  std::vector<Eigen::VectorXd> states;

  Index size() const { return static_cast<Index>(states.size()); }
  const Eigen::VectorXd& operator[](Index k) const { return states[static_cast<std::size_t>(k)]; }
};

/// Runs the Galerkin ROM over the grid of `run` without storing matrices.
/// With `linearization` the coefficients are frozen along that full-order
/// trajectory (the LTV model), otherwise at the lifted ROM state.
ReducedTrajectory simulate_galerkin(const ReducedSystem& rom, const ScenarioRun& run, const Eigen::VectorXd& x0,
                                    const DisturbanceSignal& disturbance,
                                    const StateTrajectory* linearization = nullptr);

/// RMSE(k) of the lifted ROM trajectory against a full-order reference.
Eigen::VectorXd rmse_curve(const Eigen::MatrixXd& phi, const ReducedTrajectory& rom,
                           const StateTrajectory& reference, const Eigen::VectorXd& volume);

}  // namespace formtherm
