// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/discrete_model.hpp"

#include <Eigen/Core>

#include <vector>

namespace formtherm {

struct EkfOptions {
  bool joseph = false;  // Joseph-form covariance update
};

struct EkfState {
  Eigen::VectorXd x;  // [x_r; d]
  Eigen::MatrixXd p;
  Index k = 0;
};

struct EkfUpdate {
  EkfState posterior;
  Eigen::VectorXd innovation;
  Eigen::MatrixXd innovation_covariance;
  bool jittered = false;
};

/// Process covariance in noise coordinates: Q_w, or blockdiag(Q_w, Q_d) for an
/// augmented model.
Eigen::MatrixXd process_covariance(const TransitionModel& model, const NoiseConfig& noise);

/// x- = F_k(x), P- = A P A^T + G Q G^T, resymmetrised.
EkfState ekf_predict(const EkfState& st, const TransitionModel& model, const Eigen::MatrixXd& q);

/// K = P- C^T (C P- C^T + R)^-1, x = x- + K (y - C x-), P = (I - K C) P-.
/// A numerically singular innovation covariance gets 1e-10 * trace added once.
EkfUpdate ekf_update(const EkfState& prior, const Eigen::VectorXd& y, const Eigen::MatrixXd& c,
                     const Eigen::MatrixXd& r, const EkfOptions& options = {});

struct EstimatorResult {
  std::vector<Eigen::VectorXd> states;  // posterior means, time points 0 .. steps
  std::vector<Eigen::MatrixXd> covariances;
  Eigen::MatrixXd innovations;          // row k (k >= 1); row 0 is zero
  std::vector<double> symmetry_error;   // max |P - P^T| / max(|P|, 1) per time point
  std::vector<double> min_eigenvalue;   // lambda_min(P) / ||P|| per time point
  Index jitter_count = 0;
  bool partial = false;                 // measurement stream ended before the grid

  Index size() const { return static_cast<Index>(states.size()); }
  /// Disturbance estimates, one row per time point.
  Eigen::MatrixXd disturbance(Index n_d) const;
};

/// Sequential predict/update over the measurement rows y_1 .. y_N (row 0 is
/// the initial time and is not assimilated).
EstimatorResult run_estimator(const TransitionModel& model, const Eigen::MatrixXd& measurements,
                              const NoiseConfig& noise, const Eigen::VectorXd& x0, const Eigen::MatrixXd& p0,
                              const EkfOptions& options = {});

/// Phi x_r for every estimate.
std::vector<Eigen::VectorXd> lift_estimates(const Eigen::MatrixXd& phi, const EstimatorResult& result);

}  // namespace formtherm
