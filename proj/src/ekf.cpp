// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/ekf.hpp"

#include "formtherm/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace formtherm {

namespace {

void symmetrize(Eigen::MatrixXd& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

Eigen::MatrixXd process_covariance(const TransitionModel& model, const NoiseConfig& noise) {
  const Index nd = model.disturbance_size();
  const Index nw = model.noise_size();
  if (nd == 0) {
    if (noise.process.rows() != nw) throw ValidationError("Q_w does not match the model noise dimension");
    return noise.process;
  }
  const Index r = nw - nd;
  if (noise.process.rows() != r || noise.disturbance.rows() != nd)
    throw ValidationError("Q_w / Q_d do not match the augmented model");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(nw, nw);
  q.topLeftCorner(r, r) = noise.process;
  q.bottomRightCorner(nd, nd) = noise.disturbance;
  return q;
}

EkfState ekf_predict(const EkfState& st, const TransitionModel& model, const Eigen::MatrixXd& q) {
  if (st.k >= model.steps()) throw ValidationError("cannot predict past the last step");
  const Eigen::MatrixXd a = model.jacobian(st.k, st.x);
  const Eigen::MatrixXd g = model.noise_jacobian(st.k, st.x);
  EkfState out;
  out.x = model.propagate(st.k, st.x);
  out.p = a * st.p * a.transpose() + g * q * g.transpose();
  symmetrize(out.p);
  out.k = st.k + 1;
  return out;
}

EkfUpdate ekf_update(const EkfState& prior, const Eigen::VectorXd& y, const Eigen::MatrixXd& c,
                     const Eigen::MatrixXd& r, const EkfOptions& options) {
  if (y.size() != c.rows() || r.rows() != c.rows()) throw ValidationError("measurement dimension mismatch");
  if (!y.allFinite()) throw ValidationError("measurement at step " + std::to_string(prior.k) + " is not finite");
  EkfUpdate out;
  out.innovation = y - c * prior.x;
  const Eigen::MatrixXd pct = prior.p * c.transpose();
  out.innovation_covariance = c * pct + r;
  symmetrize(out.innovation_covariance);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(out.innovation_covariance);
  auto singular = [](const Eigen::LDLT<Eigen::MatrixXd>& f) {
    if (f.info() != Eigen::Success) return true;
    const Eigen::VectorXd dv = f.vectorD();
    return !(dv.minCoeff() > 1e-14 * std::max(dv.cwiseAbs().maxCoeff(), 1e-300));
  };
  if (singular(ldlt)) {
    const double jitter = 1e-10 * out.innovation_covariance.trace();
    out.innovation_covariance.diagonal().array() += jitter;
    ldlt.compute(out.innovation_covariance);
    out.jittered = true;
    if (singular(ldlt))
      throw NumericalError("innovation covariance is singular at step " + std::to_string(prior.k));
  }
  // K = P C^T S^-1, computed as (S^-1 C P)^T with S symmetric.
  const Eigen::MatrixXd gain = ldlt.solve(pct.transpose()).transpose();

  out.posterior.k = prior.k;
  out.posterior.x = prior.x + gain * out.innovation;
  const Index n = prior.x.size();
  const Eigen::MatrixXd ikc = Eigen::MatrixXd::Identity(n, n) - gain * c;
  if (options.joseph) {
    out.posterior.p = ikc * prior.p * ikc.transpose() + gain * r * gain.transpose();
  } else {
    out.posterior.p = ikc * prior.p;
  }
  symmetrize(out.posterior.p);
  return out;
}

Eigen::MatrixXd EstimatorResult::disturbance(Index n_d) const {
  Eigen::MatrixXd d(size(), n_d);
  for (Index k = 0; k < size(); ++k) d.row(k) = states[static_cast<std::size_t>(k)].tail(n_d).transpose();
  return d;
}

EstimatorResult run_estimator(const TransitionModel& model, const Eigen::MatrixXd& measurements,
                              const NoiseConfig& noise, const Eigen::VectorXd& x0, const Eigen::MatrixXd& p0,
                              const EkfOptions& options) {
  const Index n = model.state_size();
  if (x0.size() != n || p0.rows() != n || p0.cols() != n) throw ValidationError("initial estimate has wrong dimension");
  if (measurements.cols() != model.output_size()) throw ValidationError("measurement width does not match the sensors");
  const Index nd = model.disturbance_size();
  noise.validate(model.noise_size() - nd, model.output_size(), nd);
  const Eigen::MatrixXd q = process_covariance(model, noise);

  EstimatorResult out;
  const Index last = std::min(model.steps(), measurements.rows() - 1);
  out.partial = last < model.steps();
  out.innovations = Eigen::MatrixXd::Zero(std::max<Index>(last + 1, 1), model.output_size());

  auto record = [&](const EkfState& st) {
    out.states.push_back(st.x);
    out.covariances.push_back(st.p);
    const double scale = std::max(st.p.cwiseAbs().maxCoeff(), 1.0);
    out.symmetry_error.push_back((st.p - st.p.transpose()).cwiseAbs().maxCoeff() / scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(st.p, Eigen::EigenvaluesOnly);
    const double norm = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    out.min_eigenvalue.push_back(eig.eigenvalues().minCoeff() / norm);
  };

  EkfState st{x0, p0, 0};
  symmetrize(st.p);
  record(st);
  for (Index k = 1; k <= last; ++k) {
    const EkfState prior = ekf_predict(st, model, q);
    EkfUpdate upd = ekf_update(prior, measurements.row(k).transpose(), model.output(k), noise.measurement, options);
    out.innovations.row(k) = upd.innovation.transpose();
    if (upd.jittered) ++out.jitter_count;
    st = std::move(upd.posterior);
    if (!st.x.allFinite()) throw NumericalError("estimate diverged at step " + std::to_string(k));
    record(st);
  }
  return out;
}

std::vector<Eigen::VectorXd> lift_estimates(const Eigen::MatrixXd& phi, const EstimatorResult& result) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(result.states.size());
  for (const auto& x : result.states) out.push_back(phi * x.head(phi.cols()));
  return out;
}

}  // namespace formtherm
