// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/time_grid.hpp"
#include "formtherm/trajectory.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace formtherm {

/// Origin of one snapshot column.
struct SnapshotProvenance {
  std::string run;          // scenario / run id
  Index step = 0;           // time point within the run
  ProcessInputs inputs;
  std::string disturbance;  // "none" or a description of the injected signal
};

struct SnapshotMatrix {
  Eigen::MatrixXd columns;  // n x l
  std::vector<SnapshotProvenance> provenance;

  Index rows() const { return columns.rows(); }
  Index size() const { return columns.cols(); }
  void validate() const;
  /// Columns whose provenance satisfies the predicate.
  template <class Pred>
  SnapshotMatrix filter(Pred keep) const {
    std::vector<Index> idx;
    for (Index j = 0; j < size(); ++j)
      if (keep(provenance[static_cast<std::size_t>(j)])) idx.push_back(j);
    SnapshotMatrix out;
    out.columns.resize(rows(), static_cast<Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
      out.columns.col(static_cast<Index>(c)) = columns.col(idx[c]);
      out.provenance.push_back(provenance[static_cast<std::size_t>(idx[c])]);
    }
    return out;
  }
};

struct SnapshotRun {
  std::string id;
  ProcessInputs inputs;
  std::string disturbance = "none";
  const StateTrajectory* trajectory = nullptr;
};

/// Concatenates every stride-th time point (always including t_0) of each run.
SnapshotMatrix collect_snapshots(const std::vector<SnapshotRun>& runs, Index stride = 1);

enum class EnergyNorm { kSigma, kSigmaSquared };

std::string to_string(EnergyNorm norm);
EnergyNorm energy_norm_from_string(const std::string& name);

/// sum_{i<=r} s_i / sum_i s_i with s = sigma (default) or sigma^2.
double energy_ratio(const Eigen::VectorXd& sigma, Index r, EnergyNorm norm = EnergyNorm::kSigma);

/// energy_ratio for r = 1 .. l.
Eigen::VectorXd energy_curve(const Eigen::VectorXd& sigma, EnergyNorm norm = EnergyNorm::kSigma);

/// Number of singular values above max(rows, cols) * eps * sigma_1.
Index numerical_rank(const Eigen::VectorXd& sigma, Index rows, Index cols);

struct BasisRule {
  std::optional<Index> rank;  // fixed r; when empty the energy threshold applies
  double energy = 0.99;
  EnergyNorm norm = EnergyNorm::kSigma;

  static BasisRule fixed(Index r) { return {r, 0.99, EnergyNorm::kSigma}; }
  static BasisRule threshold(double c, EnergyNorm norm = EnergyNorm::kSigma) { return {std::nullopt, c, norm}; }
};

struct PodBasis {
  Eigen::MatrixXd phi;              // n x r, orthonormal columns
  Eigen::VectorXd singular_values;  // full thin spectrum, non-increasing
  double energy = 0.0;              // energy ratio at r
  EnergyNorm norm = EnergyNorm::kSigma;
  Index numerical_rank = 0;
  std::vector<std::string> warnings;

  Index rank() const { return phi.cols(); }
  Index state_size() const { return phi.rows(); }
  /// Leading r columns of this basis (r <= rank()).
  PodBasis truncated(Index r) const;
};

/// Thin SVD A = U diag(s) V^T; only U and s are returned.
struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
};
ThinSvd thin_svd(const Eigen::MatrixXd& a);

/// POD basis from the leading left singular vectors. Each column is signed so
/// that its entry of largest magnitude is positive.
PodBasis pod_basis(const SnapshotMatrix& snapshots, const BasisRule& rule);
PodBasis pod_basis(const Eigen::MatrixXd& snapshots, const BasisRule& rule);

void save_pod_basis(const std::string& path, const PodBasis& basis);
PodBasis load_pod_basis(const std::string& path);

}  // namespace formtherm
