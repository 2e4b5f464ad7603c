// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/error.hpp"
#include "formtherm/fom.hpp"

#include "support.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <random>

using namespace formtherm;

namespace {

FilmModel no_film() {
  FilmModel f;
  f.contact_h0 = f.contact_h_per_pa = f.convection = f.emissivity = 0.0;
  f.rim_exchange = false;
  return f;
}

Mesh unit_triangle(double s) {
  Points p(3, 3);
  p << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  return make_mesh(p, {{0, 1, 2}}, s);
}

const Eigen::VectorXd kNoD = Eigen::VectorXd::Zero(1);

}  // namespace

TEST_SUITE("fom") {

TEST_CASE("single element against the P1 gradient formula") {
  const double s = 0.002, rho = 7000.0, cp = 450.0, lambda = 30.0;
  const FullOrderSystem sys(unit_triangle(s), MaterialModel::constant(rho, cp, lambda), no_film());
  const SystemMatrices m = sys.assemble(Eigen::Vector3d(900, 900, 900), test::free_slice(3, 300.0));
  // Barycentric gradients of the unit right triangle.
  Eigen::Matrix<double, 3, 2> grad;
  grad << -1, -1, 1, 0, 0, 1;
  const Eigen::Matrix3d oracle = lambda * s * 0.5 * grad * grad.transpose();
  CHECK((Eigen::Matrix3d(m.conduction) - oracle).cwiseAbs().maxCoeff() <= 1e-12);
  for (Index i = 0; i < 3; ++i) CHECK(m.mass[i] == doctest::Approx(rho * cp * s * 0.5 / 3.0).epsilon(1e-14));
  CHECK(m.robin.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("surface and rim exchange of a single element") {
  const double s = 0.002, h = 40.0;
  FilmModel film = no_film();
  film.convection = h;
  film.rim_exchange = true;
  const FullOrderSystem sys(unit_triangle(s), MaterialModel::constant(7000.0, 450.0, 30.0), film);
  const SystemMatrices m = sys.assemble(Eigen::Vector3d(900, 900, 900), test::free_slice(3, 300.0));
  // Two faces of A/3 each plus half of each adjacent rim face.
  const double face = 2.0 * 0.5 / 3.0;
  const double rim0 = s * (0.5 + 0.5);
  const double rim1 = s * (0.5 + 0.5 * std::sqrt(2.0));
  CHECK(m.robin[0] == doctest::Approx(h * (face + rim0)).epsilon(1e-13));
  CHECK(m.robin[1] == doctest::Approx(h * (face + rim1)).epsilon(1e-13));
  CHECK(m.load[2] == doctest::Approx(m.robin[2] * 300.0).epsilon(1e-13));
}

TEST_CASE("assembled operator structure") {
  const Scenario sc = test::coarse_scenario();
  const FullOrderSystem sys(sc.mesh, MaterialModel::stainless_default(), FilmModel{});
  const ScenarioRun run = realize(sc, sc.reference);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(400.0, 1200.0);
  Eigen::VectorXd q(sys.size());
  for (Index i = 0; i < q.size(); ++i) q[i] = u(rng);
  const SystemMatrices m = sys.assemble(q, run.parameters[run.grid.first_step(Phase::kHolding) + 3]);
  const Eigen::MatrixXd k = Eigen::MatrixXd(m.conduction);
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * k.cwiseAbs().maxCoeff());
  CHECK((k * Eigen::VectorXd::Ones(q.size())).cwiseAbs().maxCoeff() <= 1e-12 * k.cwiseAbs().maxCoeff());
  CHECK(m.mass.minCoeff() > 0.0);
  CHECK(m.robin.minCoeff() > 0.0);
  const Eigen::MatrixXd stiff = Eigen::MatrixXd(m.stiffness());
  CHECK((stiff + k).diagonal().isApprox(-m.robin));
}

TEST_CASE("assembly is invariant under rigid motion") {
  const Mesh mesh = build_sheet_mesh({0.1, 0.02, 0.002}, 0.02);
  const FullOrderSystem sys(mesh, MaterialModel::stainless_default(), FilmModel{});
  const Index n = mesh.node_count();
  const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(n, 500.0, 1100.0);
  ParameterSlice a = test::free_slice(n, 300.0);
  ParameterSlice b = a;
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(1.1, Eigen::Vector3d(0.3, 1.0, 0.2).normalized()).toRotationMatrix();
  b.displacement = mesh.reference * rot.transpose() - mesh.reference;
  const SystemMatrices ma = sys.assemble(q, a), mb = sys.assemble(q, b);
  CHECK((Eigen::MatrixXd(ma.conduction) - Eigen::MatrixXd(mb.conduction)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((ma.robin - mb.robin).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((ma.mass - mb.mass).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("adiabatic sheet conserves heat content") {
  const Mesh mesh = build_sheet_mesh({0.1, 0.02, 0.002}, 0.01);
  const FullOrderSystem sys(mesh, MaterialModel::constant(7700.0, 500.0, 25.0), no_film());
  const Index n = mesh.node_count();
  const ParameterSlice p = test::free_slice(n, 300.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(700.0, 1100.0);
  Eigen::VectorXd q(n);
  for (Index i = 0; i < n; ++i) q[i] = u(rng);
  const Eigen::VectorXd mass = 7700.0 * 500.0 * mesh.lumped_volume;
  const double e0 = mass.dot(q);
  const double spread0 = q.maxCoeff() - q.minCoeff();
  FomStepper stepper(sys);
  for (int k = 0; k < 100; ++k) {
    q = stepper.step(q, p, 0.05, kNoD);
    CHECK(std::abs(mass.dot(q) - e0) <= 1e-8 * e0);
  }
  CHECK(q.maxCoeff() - q.minCoeff() < spread0);
}

TEST_CASE("uniform Newton cooling follows the implicit Euler recursion") {
  const Mesh mesh = build_sheet_mesh({0.1, 0.02, 0.002}, 0.01);
  FilmModel film = no_film();
  film.convection = 50.0;
  const double rho = 7700.0, cp = 500.0, s = 0.002, t_inf = 300.0, t0 = 1000.0, dt = 0.1;
  const FullOrderSystem sys(mesh, MaterialModel::constant(rho, cp, 25.0), film);
  const ParameterSlice p = test::free_slice(mesh.node_count(), t_inf);
  Eigen::VectorXd q = Eigen::VectorXd::Constant(mesh.node_count(), t0);
  const double a = 2.0 * 50.0 / (rho * cp * s);
  double discrete = t0 - t_inf;
  FomStepper stepper(sys);
  for (int k = 1; k <= 600; ++k) {
    q = stepper.step(q, p, dt, kNoD);
    discrete /= 1.0 + a * dt;
    const double exact = (t0 - t_inf) * std::exp(-a * dt * k);
    CHECK((q.array() - t_inf - discrete).abs().maxCoeff() <= 1e-9 * discrete);
    CHECK((q.array() - t_inf - exact).abs().maxCoeff() <= 5e-3 * exact);
  }
}

TEST_CASE("constant source matches the same power injected as a disturbance") {
  const Mesh mesh = build_sheet_mesh({0.1, 0.02, 0.002}, 0.01);
  const double g0 = 2.0e6;
  MaterialModel with = MaterialModel::stainless_default();
  with.induced_heat = PiecewiseLinear::constant(g0);
  DisturbanceModel all;
  all.regions = {DisturbanceRegion::all()};
  const FullOrderSystem a(mesh, with, FilmModel{});
  const FullOrderSystem b(mesh, MaterialModel::stainless_default(), FilmModel{}, all);
  const ParameterSlice p = test::free_slice(mesh.node_count(), 300.0);
  Eigen::VectorXd qa = Eigen::VectorXd::Constant(mesh.node_count(), 1000.0), qb = qa;
  const Eigen::VectorXd d = Eigen::VectorXd::Constant(1, g0);
  for (int k = 0; k < 50; ++k) {
    qa = step_fom(a, qa, p, 0.05, kNoD);
    qb = step_fom(b, qb, p, 0.05, d);
    CHECK((qa - qb).cwiseAbs().maxCoeff() <= 1e-8 * qa.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("disturbance matrix covers the contact region with scaled volumes") {
  const Scenario sc = test::coarse_scenario();
  DisturbanceModel dm;
  dm.unit = 1e6;
  const FullOrderSystem sys(sc.mesh, MaterialModel::stainless_default(), FilmModel{}, dm);
  const ScenarioRun run = realize(sc, sc.reference);
  const ParameterSlice& p = run.parameters[run.grid.first_step(Phase::kHolding) + 2];
  const DisturbanceMatrix e = sys.disturbance_matrix(p);
  const MeshGeometry geo = compute_geometry(sc.mesh, sc.mesh.reference + p.displacement);
  for (Index i = 0; i < sys.size(); ++i) {
    const double expected = p.tool_distance[i] <= sc.contact_threshold ? geo.lumped_volume[i] * 1e6 : 0.0;
    CHECK(e.matrix(i, 0) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(e.empty_columns.empty());
  CHECK(sys.disturbance_matrix(run.parameters[0]).empty_columns.size() == 1);
}

TEST_CASE("forming run stays within the data bounds") {
  const Scenario sc = test::coarse_scenario();
  const FullOrderSystem sys(sc.mesh, MaterialModel::stainless_default(), FilmModel{});
  const ScenarioRun run = realize(sc, sc.reference);
  const StateTrajectory traj = simulate_fom(sys, run, sc.sensors, DisturbanceSignal(1));
  REQUIRE(traj.size() == run.grid.steps() + 1);
  const double hi = sc.reference.t_aust_avg;
  const double lo = std::min(sc.tool.tool_temperature, sc.tool.ambient_temperature);
  for (Index k = 0; k < traj.size(); ++k) {
    CHECK(traj[k].maxCoeff() <= hi + 1e-9);
    CHECK(traj[k].minCoeff() >= lo - 1e-9);
    const SensorSelection c = output_matrix(sc.sensors, sc.mesh, run.parameters[k].displacement);
    CHECK((traj.readings.row(k).transpose() - c.apply(traj[k])).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(traj[run.grid.steps()].maxCoeff() < hi - 100.0);
}

TEST_CASE("disturbance signal holds on half-open segments") {
  const DisturbanceSignal d = DisturbanceSignal::pulse(9.0, 11.0, 1000.0);
  CHECK(d.at(8.999)[0] == 0.0);
  CHECK(d.at(9.0)[0] == 1000.0);
  CHECK(d.at(10.99)[0] == 1000.0);
  CHECK(d.at(11.0)[0] == 0.0);
  CHECK(DisturbanceSignal(2).at(3.0).size() == 2);
}

TEST_CASE("volume-weighted error") {
  const Eigen::Vector3d v(1.0, 2.0, 1.0);
  CHECK(rmse(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 0, 7), v) == doctest::Approx((0 + 4 + 4) / 4.0));
  CHECK_THROWS_AS(rmse(Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 0, 7), v), ValidationError);
}

}
