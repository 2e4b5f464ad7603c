// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/pod.hpp"

#include "formtherm/container.hpp"
#include "formtherm/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace formtherm {

void SnapshotMatrix::validate() const {
  if (static_cast<Index>(provenance.size()) != size())
    throw ValidationError("snapshot provenance length does not match the column count");
  if (!columns.allFinite()) throw ValidationError("snapshot matrix contains non-finite entries");
}

SnapshotMatrix collect_snapshots(const std::vector<SnapshotRun>& runs, Index stride) {
  if (stride < 1) throw ValidationError("snapshot stride must be at least 1");
  if (runs.empty()) throw ValidationError("no snapshot runs given");
  Index n = -1;
  Index l = 0;
  for (const auto& run : runs) {
    if (run.trajectory == nullptr || run.trajectory->size() == 0)
      throw ValidationError("snapshot run '" + run.id + "' has no trajectory");
    const Index rows = (*run.trajectory)[0].size();
    if (n >= 0 && rows != n)
      throw ValidationError("snapshot run '" + run.id + "' is on a different mesh (" + std::to_string(rows) +
                            " nodes, expected " + std::to_string(n) + ")");
    n = rows;
    l += (run.trajectory->size() - 1) / stride + 1;
  }

  SnapshotMatrix out;
  out.columns.resize(n, l);
  out.provenance.reserve(static_cast<std::size_t>(l));
  Index c = 0;
  for (const auto& run : runs) {
    for (Index k = 0; k < run.trajectory->size(); k += stride) {
      const Eigen::VectorXd& q = (*run.trajectory)[k];
      if (q.size() != n) throw ValidationError("snapshot run '" + run.id + "' changes size at step " + std::to_string(k));
      out.columns.col(c++) = q;
      out.provenance.push_back({run.id, k, run.inputs, run.disturbance});
    }
  }
  out.validate();
  return out;
}

std::string to_string(EnergyNorm norm) { return norm == EnergyNorm::kSigma ? "sigma" : "sigma2"; }

EnergyNorm energy_norm_from_string(const std::string& name) {
  if (name == "sigma") return EnergyNorm::kSigma;
  if (name == "sigma2") return EnergyNorm::kSigmaSquared;
  throw ValidationError("unknown energy norm '" + name + "' (expected sigma or sigma2)");
}

Eigen::VectorXd energy_curve(const Eigen::VectorXd& sigma, EnergyNorm norm) {
  const Eigen::VectorXd s = norm == EnergyNorm::kSigma ? sigma : Eigen::VectorXd(sigma.array().square());
  Eigen::VectorXd curve(s.size());
  double acc = 0.0;
  for (Index i = 0; i < s.size(); ++i) curve[i] = (acc += s[i]);
  if (acc > 0.0) curve /= acc;
  // Guard against rounding in the final partial sum.
  if (curve.size() > 0) curve[curve.size() - 1] = 1.0;
  return curve;
}

double energy_ratio(const Eigen::VectorXd& sigma, Index r, EnergyNorm norm) {
  if (r < 1 || r > sigma.size()) throw ValidationError("energy ratio needs 1 <= r <= l");
  return energy_curve(sigma, norm)[r - 1];
}

Index numerical_rank(const Eigen::VectorXd& sigma, Index rows, Index cols) {
  if (sigma.size() == 0 || !(sigma[0] > 0.0)) return 0;
  const double tol = static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma[0];
  Index r = 0;
  while (r < sigma.size() && sigma[r] > tol) ++r;
  return r;
}

ThinSvd thin_svd(const Eigen::MatrixXd& a) {
  ThinSvd out;
  if (a.rows() == 0 || a.cols() == 0) return out;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD of the snapshot matrix did not converge");
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  return out;
}

PodBasis PodBasis::truncated(Index r) const {
  if (r < 1 || r > rank()) throw ValidationError("cannot truncate a rank-" + std::to_string(rank()) + " basis to " + std::to_string(r));
  PodBasis out = *this;
  out.phi = phi.leftCols(r);
  out.energy = energy_ratio(singular_values, r, norm);
  out.warnings.clear();
  return out;
}

PodBasis pod_basis(const Eigen::MatrixXd& snapshots, const BasisRule& rule) {
  if (snapshots.cols() < 1 || snapshots.rows() < 1) throw ValidationError("POD needs at least one snapshot");
  if (!snapshots.allFinite()) throw ValidationError("snapshot matrix contains non-finite entries");
  if (rule.rank && *rule.rank < 1) throw ValidationError("POD rank must be at least 1");
  if (!rule.rank && !(rule.energy > 0.0 && rule.energy <= 1.0))
    throw ValidationError("POD energy threshold must lie in (0, 1]");

  ThinSvd svd = thin_svd(snapshots);
  PodBasis basis;
  basis.norm = rule.norm;
  basis.singular_values = svd.sigma;
  basis.numerical_rank = numerical_rank(svd.sigma, snapshots.rows(), snapshots.cols());
  if (basis.numerical_rank == 0) throw NumericalError("snapshot matrix is numerically zero");

  Index r = 0;
  if (rule.rank) {
    r = *rule.rank;
    if (r > basis.numerical_rank) {
      basis.warnings.push_back("requested rank " + std::to_string(r) + " exceeds the numerical rank " +
                               std::to_string(basis.numerical_rank) + "; reduced");
      r = basis.numerical_rank;
    }
  } else {
    const Eigen::VectorXd curve = energy_curve(svd.sigma, rule.norm);
    while (r < curve.size() && curve[r] < rule.energy) ++r;
    r = std::min<Index>(r + 1, basis.numerical_rank);
  }

  basis.phi = svd.u.leftCols(r);
  for (Index j = 0; j < r; ++j) {
    Index imax = 0;
    basis.phi.col(j).cwiseAbs().maxCoeff(&imax);
    if (basis.phi(imax, j) < 0.0) basis.phi.col(j) *= -1.0;
  }
  basis.energy = energy_ratio(svd.sigma, r, rule.norm);
  return basis;
}

PodBasis pod_basis(const SnapshotMatrix& snapshots, const BasisRule& rule) {
  snapshots.validate();
  return pod_basis(snapshots.columns, rule);
}

void save_pod_basis(const std::string& path, const PodBasis& basis) {
  ContainerHeader header;
  header.kind = "pod_basis";
  header.set("nodes", static_cast<long>(basis.state_size()));
  header.set("rank", static_cast<long>(basis.rank()));
  header.set("numerical_rank", static_cast<long>(basis.numerical_rank));
  header.set("energy", basis.energy);
  header.set("norm", to_string(basis.norm));
  header.statics = {{"phi", basis.state_size(), basis.rank()}, {"singular_values", basis.singular_values.size(), 1}};
  ContainerWriter writer(path, header);
  writer.write_static(basis.phi);
  writer.write_static(basis.singular_values);
  writer.finish();
}

PodBasis load_pod_basis(const std::string& path) {
  ContainerReader reader(path);
  const ContainerHeader& h = reader.header();
  if (h.kind != "pod_basis") throw FormatError("'" + path + "' is a " + h.kind + ", not a pod_basis");
  if (h.statics.size() != 2 || h.statics[0].name != "phi" || h.statics[1].name != "singular_values" ||
      h.statics[1].cols != 1)
    throw FormatError("'" + path + "' has an unexpected pod_basis layout");
  PodBasis basis;
  basis.norm = energy_norm_from_string(h.get("norm"));
  basis.numerical_rank = h.get_long("numerical_rank");
  basis.phi = reader.read_static();
  basis.singular_values = reader.read_static();
  reader.expect_end();
  if (basis.phi.rows() != h.get_long("nodes") || basis.phi.cols() != h.get_long("rank"))
    throw FormatError("'" + path + "' basis shape disagrees with its attributes");
  basis.energy = h.get_double("energy");
  return basis;
}

}  // namespace formtherm
