// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/galerkin.hpp"

#include "formtherm/error.hpp"

#include <Eigen/LU>

namespace formtherm {

ReducedMatrices project_matrices(const Eigen::MatrixXd& phi, const SystemMatrices& sys,
                                 const DisturbanceMatrix& e, const SensorSelection& c) {
  if (phi.rows() != sys.mass.size()) throw ValidationError("basis does not match the system size");
  ReducedMatrices red;
  Eigen::MatrixXd k_phi = sys.conduction * phi;
  k_phi += sys.robin.asDiagonal() * phi;
  const Eigen::MatrixXd m_phi = sys.mass.asDiagonal() * phi;
  red.mass.noalias() = phi.transpose() * m_phi;
  red.stiffness.noalias() = -(phi.transpose() * k_phi);
  red.mass = 0.5 * (red.mass + red.mass.transpose()).eval();
  red.stiffness = 0.5 * (red.stiffness + red.stiffness.transpose()).eval();
  red.load = phi.transpose() * sys.load;
  red.disturbance = phi.transpose() * e.matrix;
  red.output = c.apply_rows(phi);
  return red;
}

Eigen::VectorXd step_reduced(const ReducedMatrices& red, const Eigen::VectorXd& x, double h,
                             const Eigen::VectorXd& d) {
  if (!(h > 0.0)) throw ValidationError("step size must be positive");
  const Eigen::MatrixXd lhs = red.mass - h * red.stiffness;
  Eigen::VectorXd rhs = red.mass * x + h * red.load;
  if (d.size() > 0) rhs.noalias() += h * (red.disturbance * d);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) throw NumericalError("reduced step matrix is ill-conditioned (rcond " + std::to_string(rcond) + ")");
  Eigen::VectorXd next = lu.solve(rhs);
  if (!next.allFinite()) throw NumericalError("reduced step produced non-finite values");
  return next;
}

ReducedSystem::ReducedSystem(const FullOrderSystem& system, Eigen::MatrixXd phi, SensorConfig sensors)
    : system_(system), phi_(std::move(phi)), sensors_(std::move(sensors)) {
  if (phi_.rows() != system_.size()) throw ValidationError("basis does not match the mesh");
  if (phi_.cols() < 1) throw ValidationError("basis has no columns");
}

ReducedMatrices ReducedSystem::assemble_full(const Eigen::VectorXd& q, const ParameterSlice& p) const {
  return project_matrices(phi_, system_.assemble(q, p), system_.disturbance_matrix(p),
                          output_matrix(sensors_, system_.mesh(), p.displacement));
}

Eigen::VectorXd ReducedSystem::step(const Eigen::VectorXd& x, const ParameterSlice& p, double h,
                                    const Eigen::VectorXd& d) const {
  return step_reduced(assemble(x, p), x, h, d);
}

ReducedTrajectory simulate_galerkin(const ReducedSystem& rom, const ScenarioRun& run, const Eigen::VectorXd& x0,
                                    const DisturbanceSignal& disturbance, const StateTrajectory* linearization) {
  const Index n_t = run.grid.steps();
  if (run.parameters.size() != n_t + 1) throw ValidationError("parameter trajectory does not cover the grid");
  if (linearization && linearization->size() < n_t)
    throw ValidationError("linearization trajectory is missing steps");
  if (x0.size() != rom.rank()) throw ValidationError("initial reduced state has wrong dimension");
  ReducedTrajectory out;
  out.states.reserve(static_cast<std::size_t>(n_t + 1));
  out.states.push_back(x0);
  for (Index k = 0; k < n_t; ++k) {
    const ReducedMatrices red = linearization ? rom.assemble_full((*linearization)[k], run.parameters[k])
                                              : rom.assemble(out[k], run.parameters[k]);
    out.states.push_back(step_reduced(red, out[k], run.grid.step_size(k), disturbance.at(run.grid.time(k))));
  }
  return out;
}

Eigen::VectorXd rmse_curve(const Eigen::MatrixXd& phi, const ReducedTrajectory& rom,
                           const StateTrajectory& reference, const Eigen::VectorXd& volume) {
  const Index n = std::min(rom.size(), reference.size());
  Eigen::VectorXd e(n);
  for (Index k = 0; k < n; ++k) e[k] = rmse(phi * rom[k], reference[k], volume);
  return e;
}

}  // namespace formtherm
