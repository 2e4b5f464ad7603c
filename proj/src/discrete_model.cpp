// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/discrete_model.hpp"

#include "formtherm/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace formtherm {

namespace {

void check_spd(const Eigen::MatrixXd& a, Index n, const std::string& name) {
  if (a.rows() != n || a.cols() != n)
    throw ValidationError(name + " must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!a.allFinite()) throw ValidationError(name + " has non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ValidationError(name + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) throw ValidationError(name + " is not positive definite");
}

}  // namespace

NoiseConfig NoiseConfig::diagonal(Index r, double q_w, Index m, double r_v, Index n_d, double q_d) {
  NoiseConfig n;
  n.process = q_w * Eigen::MatrixXd::Identity(r, r);
  n.measurement = r_v * Eigen::MatrixXd::Identity(m, m);
  n.disturbance = q_d * Eigen::MatrixXd::Identity(n_d, n_d);
  return n;
}

void NoiseConfig::validate(Index r, Index m, Index n_d) const {
  check_spd(process, r, "Q_w");
  check_spd(measurement, m, "R_v");
  if (n_d > 0) check_spd(disturbance, n_d, "Q_d");
}

AffineModel::AffineModel(std::vector<AffineStep> steps, std::vector<Eigen::MatrixXd> outputs, Index disturbances)
    : steps_(std::move(steps)), outputs_(std::move(outputs)), disturbances_(disturbances) {
  if (steps_.empty()) throw ValidationError("affine model has no steps");
  if (outputs_.size() != steps_.size() + 1) throw ValidationError("affine model needs one output matrix per time point");
  const Index n = steps_.front().a.rows();
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    const auto& s = steps_[k];
    if (s.a.rows() != n || s.a.cols() != n || s.c.size() != n || s.g.rows() != n)
      throw ValidationError("affine model step " + std::to_string(k) + " has inconsistent shapes");
    if (!s.a.allFinite() || !s.c.allFinite()) throw NumericalError("affine model step " + std::to_string(k) + " is not finite");
  }
  for (const auto& c : outputs_)
    if (c.cols() != n) throw ValidationError("affine model output matrix has wrong width");
}

Eigen::VectorXd AffineModel::propagate(Index k, const Eigen::VectorXd& x) const {
  const AffineStep& s = at(k);
  return s.a * x + s.c;
}

AffineModel discretize(const LtvSchedule& schedule, const TimeGrid& grid) {
  schedule.validate();
  if (grid.steps() != schedule.steps()) throw ValidationError("grid and schedule step counts differ");
  std::vector<AffineStep> steps;
  std::vector<Eigen::MatrixXd> outputs;
  steps.reserve(static_cast<std::size_t>(grid.steps()));
  for (Index k = 0; k < grid.steps(); ++k) {
    const ReducedMatrices& e = schedule[k];
    const double h = grid.step_size(k);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(e.mass - h * e.stiffness);
    if (!(lu.rcond() > 1e-14)) throw NumericalError("step matrix is not invertible at step " + std::to_string(k));
    AffineStep s;
    s.a = lu.solve(e.mass);
    s.c = lu.solve(h * e.load);
    s.g = lu.solve(h * Eigen::MatrixXd::Identity(e.mass.rows(), e.mass.rows()));
    s.b_d = lu.solve(h * e.disturbance);
    steps.push_back(std::move(s));
  }
  for (Index k = 0; k <= grid.steps(); ++k) outputs.push_back(schedule[k].output);
  return AffineModel(std::move(steps), std::move(outputs));
}

AffineModel augment(const AffineModel& model) {
  if (model.disturbance_size() != 0) throw ValidationError("model is already augmented");
  const Index r = model.state_size();
  const Index nd = model.at(0).b_d.cols();
  if (nd < 1) throw ValidationError("augmentation needs at least one disturbance channel");
  const Index nw = model.noise_size();
  std::vector<AffineStep> steps;
  std::vector<Eigen::MatrixXd> outputs;
  for (Index k = 0; k < model.steps(); ++k) {
    const AffineStep& s = model.at(k);
    AffineStep a;
    a.a = Eigen::MatrixXd::Zero(r + nd, r + nd);
    a.a.topLeftCorner(r, r) = s.a;
    a.a.topRightCorner(r, nd) = s.b_d;
    a.a.bottomRightCorner(nd, nd).setIdentity();
    a.c = Eigen::VectorXd::Zero(r + nd);
    a.c.head(r) = s.c;
    a.g = Eigen::MatrixXd::Zero(r + nd, nw + nd);
    a.g.topLeftCorner(r, nw) = s.g;
    a.g.bottomRightCorner(nd, nd).setIdentity();
    a.b_d = Eigen::MatrixXd::Zero(r + nd, nd);
    steps.push_back(std::move(a));
  }
  for (Index k = 0; k <= model.steps(); ++k) {
    const Eigen::MatrixXd c = model.output(k);
    Eigen::MatrixXd ca = Eigen::MatrixXd::Zero(c.rows(), r + nd);
    ca.leftCols(r) = c;
    outputs.push_back(std::move(ca));
  }
  return AffineModel(std::move(steps), std::move(outputs), nd);
}

// ---------------------------------------------------------------------------

NonlinearRomModel::NonlinearRomModel(const ReducedSystem& rom, const ScenarioRun& run, bool augmented)
    : rom_(rom), run_(run), augmented_(augmented), nd_(rom.system().disturbance().size()) {
  if (run_.parameters.size() != run_.grid.steps() + 1) throw ValidationError("run does not cover its grid");
}

Eigen::VectorXd NonlinearRomModel::propagate(Index k, const Eigen::VectorXd& x) const {
  const Index r = rom_.rank();
  const Eigen::VectorXd d = augmented_ ? Eigen::VectorXd(x.tail(nd_)) : Eigen::VectorXd::Zero(nd_);
  Eigen::VectorXd out(state_size());
  out.head(r) = rom_.step(x.head(r), run_.parameters[k], run_.grid.step_size(k), d);
  if (augmented_) out.tail(nd_) = x.tail(nd_);
  return out;
}

Eigen::MatrixXd NonlinearRomModel::jacobian(Index k, const Eigen::VectorXd& x) const {
  return finite_difference_jacobian([&](const Eigen::VectorXd& z) { return propagate(k, z); }, x);
}

Eigen::MatrixXd NonlinearRomModel::noise_jacobian(Index k, const Eigen::VectorXd& x) const {
  const Index r = rom_.rank();
  const ReducedMatrices red = rom_.assemble(x.head(r), run_.parameters[k]);
  const double h = run_.grid.step_size(k);
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(state_size(), state_size());
  g.topLeftCorner(r, r) = (red.mass - h * red.stiffness).partialPivLu().solve(h * Eigen::MatrixXd::Identity(r, r));
  return g;
}

Eigen::MatrixXd NonlinearRomModel::output(Index k) const {
  const SensorSelection c = output_matrix(rom_.sensors(), rom_.system().mesh(), run_.parameters[k].displacement);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.rows(), state_size());
  out.leftCols(rom_.rank()) = c.apply_rows(rom_.basis());
  return out;
}

Eigen::MatrixXd finite_difference_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x, double rel) {
  if (!x.allFinite()) throw ValidationError("finite-difference point is not finite");
  Eigen::MatrixXd jac;
  Eigen::VectorXd xp = x;
  for (Index j = 0; j < x.size(); ++j) {
    const double step = rel * std::max(std::abs(x[j]), 1.0);
    xp[j] = x[j] + step;
    const Eigen::VectorXd fp = f(xp);
    xp[j] = x[j] - step;
    const Eigen::VectorXd fm = f(xp);
    xp[j] = x[j];
    if (j == 0) jac.resize(fp.size(), x.size());
    jac.col(j) = (fp - fm) / (2.0 * step);
  }
  return jac;
}

double observability_margin(const TransitionModel& model, const Eigen::VectorXd& x, Index first, Index horizon) {
  if (first < 0 || first > model.steps()) throw ValidationError("observability window starts outside the grid");
  const Index last = std::min(model.steps(), first + horizon);
  const Index n = model.state_size();
  Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd xk = x;
  for (Index k = first; k <= last; ++k) {
    const Eigen::MatrixXd cp = model.output(k) * psi;
    gram.noalias() += cp.transpose() * cp;
    if (k == last) break;
    psi = model.jacobian(k, xk) * psi;
    xk = model.propagate(k, xk);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
  return svd.singularValues().minCoeff();
}

}  // namespace formtherm
