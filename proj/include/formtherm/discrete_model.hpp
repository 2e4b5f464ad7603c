// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/galerkin.hpp"
#include "formtherm/ltv.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

namespace formtherm {

/// Covariances of the estimator. `process` is Q_w (r x r) acting through G,
/// `disturbance` is Q_d (n_d x n_d) of the random-walk disturbance model.
struct NoiseConfig {
  Eigen::MatrixXd process;
  Eigen::MatrixXd measurement;
  Eigen::MatrixXd disturbance;

  static NoiseConfig diagonal(Index r, double q_w, Index m, double r_v, Index n_d, double q_d);
  /// Symmetric within 1e-12 (relative) and positive definite. Q_d may be empty
  /// when no disturbance is estimated.
  void validate(Index r, Index m, Index n_d) const;
};

/// Sampled-data model x_{k+1} = F_k(x_k) + G_k w_k, y_k = C_k x_k. Outputs are
/// indexed by time point (0 .. steps()), transitions by step (0 .. steps()-1).
class TransitionModel {
public:
  virtual ~TransitionModel() = default;

  virtual Index state_size() const = 0;
  virtual Index noise_size() const = 0;
  virtual Index output_size() const = 0;
  virtual Index steps() const = 0;
  /// Trailing states that are estimated disturbances (0 if not augmented).
  virtual Index disturbance_size() const { return 0; }

  virtual Eigen::VectorXd propagate(Index k, const Eigen::VectorXd& x) const = 0;
  /// A_k = dF_k/dx at x.
  virtual Eigen::MatrixXd jacobian(Index k, const Eigen::VectorXd& x) const = 0;
  /// G_k = dF_k/dw at x.
  virtual Eigen::MatrixXd noise_jacobian(Index k, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd output(Index k) const = 0;
};

/// One affine step x+ = A x + c + B_d d + G w.
struct AffineStep {
  Eigen::MatrixXd a;
  Eigen::VectorXd c;
  Eigen::MatrixXd g;
  Eigen::MatrixXd b_d;  // r x n_d
};

/// Precomputed affine model; jacobians do not depend on x.
class AffineModel : public TransitionModel {
public:
  AffineModel(std::vector<AffineStep> steps, std::vector<Eigen::MatrixXd> outputs, Index disturbances = 0);

  Index state_size() const override { return steps_.front().a.rows(); }
  Index noise_size() const override { return steps_.front().g.cols(); }
  Index output_size() const override { return outputs_.front().rows(); }
  Index steps() const override { return static_cast<Index>(steps_.size()); }
  Index disturbance_size() const override { return disturbances_; }

  Eigen::VectorXd propagate(Index k, const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd jacobian(Index k, const Eigen::VectorXd&) const override { return at(k).a; }
  Eigen::MatrixXd noise_jacobian(Index k, const Eigen::VectorXd&) const override { return at(k).g; }
  Eigen::MatrixXd output(Index k) const override { return outputs_[static_cast<std::size_t>(k)]; }

  const AffineStep& at(Index k) const { return steps_[static_cast<std::size_t>(k)]; }

private:
  std::vector<AffineStep> steps_;
  std::vector<Eigen::MatrixXd> outputs_;
  Index disturbances_ = 0;
};

/// Semi-implicit Euler discretisation of the schedule on the given grid:
///   A = S^-1 M, c = S^-1 h b, G = S^-1 h, B_d = S^-1 h E, S = M - h K.
AffineModel discretize(const LtvSchedule& schedule, const TimeGrid& grid);

/// Disturbance augmentation with the random-walk hold d_{k+1} = d_k + w_d:
/// state [x; d], A = [[A, B_d], [0, I]], G = blockdiag(G, I), C = [C, 0].
AffineModel augment(const AffineModel& model);

/// Nonlinear Galerkin ROM as a transition model. Jacobians are central finite
/// differences; with `augmented` the state carries the disturbance as well.
class NonlinearRomModel : public TransitionModel {
public:
  NonlinearRomModel(const ReducedSystem& rom, const ScenarioRun& run, bool augmented);

  Index state_size() const override { return rom_.rank() + (augmented_ ? nd_ : 0); }
  Index noise_size() const override { return state_size(); }
  Index output_size() const override { return rom_.sensors().count(); }
  Index steps() const override { return run_.grid.steps(); }
  Index disturbance_size() const override { return augmented_ ? nd_ : 0; }

  Eigen::VectorXd propagate(Index k, const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd jacobian(Index k, const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd noise_jacobian(Index k, const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd output(Index k) const override;

private:
  const ReducedSystem& rom_;
  const ScenarioRun& run_;
  bool augmented_;
  Index nd_;
};

/// Central differences with step rel * max(|x_j|, 1) per coordinate.
Eigen::MatrixXd finite_difference_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x, double rel = 1e-6);

/// Smallest singular value of the observability Gramian
/// sum_k Psi_k^T C_k^T C_k Psi_k over time points [first, first + horizon],
/// Psi_k the state transition from `first` to k.
double observability_margin(const TransitionModel& model, const Eigen::VectorXd& x, Index first, Index horizon);

}  // namespace formtherm
