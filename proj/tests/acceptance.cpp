// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion. Criteria 1-5 and 9 run
// the nominal experiment; 6-8 check the library against oracles written here.

#include "formtherm/evaluation.hpp"

#include "support.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

using namespace formtherm;

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CriterionResult fom_oracles() {
  CriterionResult r;
  r.id = 6;
  r.title = "FOM analytic oracles";
  const Mesh mesh = build_sheet_mesh({0.1, 0.02, 0.002}, 0.01);
  const Index n = mesh.node_count();
  const Eigen::VectorXd none = Eigen::VectorXd::Zero(1);
  FilmModel off;
  off.contact_h0 = off.contact_h_per_pa = off.convection = off.emissivity = 0.0;
  off.rim_exchange = false;
  const double rho = 7700.0, cp = 500.0;

  // Heat content rho c_p V . q of an insulated sheet.
  double drift = 0.0;
  {
    const FullOrderSystem sys(mesh, MaterialModel::constant(rho, cp, 25.0), off);
    const ParameterSlice p = test::free_slice(n, 300.0);
    Eigen::VectorXd q = 900.0 + 100.0 * test::gaussian(n, 1, 61).col(0).array();
    const Eigen::VectorXd m = rho * cp * mesh.lumped_volume;
    const double e0 = m.dot(q);
    for (int k = 0; k < 50; ++k) {
      q = step_fom(sys, q, p, 0.05, none);
      drift = std::max(drift, std::abs(m.dot(q) - e0) / e0);
    }
  }
  // Newton cooling without gradients: T_inf + (T0 - T_inf) exp(-2 h t / (rho c_p s)).
  double cooling = 0.0;
  {
    FilmModel film = off;
    film.convection = 50.0;
    const FullOrderSystem sys(mesh, MaterialModel::constant(rho, cp, 25.0), film);
    const ParameterSlice p = test::free_slice(n, 300.0);
    Eigen::VectorXd q = Eigen::VectorXd::Constant(n, 1000.0);
    const double a = 2.0 * 50.0 / (rho * cp * 0.002);
    for (int k = 1; k <= 600; ++k) {
      q = step_fom(sys, q, p, 0.1, none);
      const double exact = 700.0 * std::exp(-a * 0.1 * k);
      cooling = std::max(cooling, (q.array() - 300.0 - exact).abs().maxCoeff() / exact);
    }
  }
  // Bounds from initial, tool and ambient temperatures.
  double violation = 0.0;
  {
    const Scenario sc = test::coarse_scenario(0.02);
    const FullOrderSystem sys(sc.mesh, MaterialModel::stainless_default(), FilmModel{});
    const ScenarioRun run = realize(sc, sc.reference);
    const StateTrajectory t = simulate_fom(sys, run, sc.sensors, DisturbanceSignal(1));
    const double hi = sc.reference.t_aust_avg;
    const double lo = std::min(sc.tool.tool_temperature, sc.tool.ambient_temperature);
    for (const auto& q : t.temperatures) violation = std::max({violation, q.maxCoeff() - hi, lo - q.minCoeff()});
  }
  // g = g0 everywhere versus E d with d = g0 on the whole sheet.
  double source = 0.0;
  {
    MaterialModel with = MaterialModel::stainless_default();
    with.induced_heat = PiecewiseLinear::constant(1.0e6);
    DisturbanceModel all;
    all.regions = {DisturbanceRegion::all()};
    const FullOrderSystem a(mesh, with, FilmModel{});
    const FullOrderSystem b(mesh, MaterialModel::stainless_default(), FilmModel{}, all);
    const ParameterSlice p = test::free_slice(n, 300.0);
    Eigen::VectorXd qa = Eigen::VectorXd::Constant(n, 1000.0), qb = qa;
    for (int k = 0; k < 50; ++k) {
      qa = step_fom(a, qa, p, 0.05, none);
      qb = step_fom(b, qb, p, 0.05, Eigen::VectorXd::Constant(1, 1.0e6));
      source = std::max(source, (qa - qb).cwiseAbs().maxCoeff() / qa.cwiseAbs().maxCoeff());
    }
  }
  r.passed = drift <= 1e-8 && cooling <= 5e-3 && violation <= 1e-9 && source <= 1e-8;
  r.detail = "energy drift " + sci(drift) + "; cooling error " + sci(cooling) + "; bound violation " + sci(violation) +
             " K; source mismatch " + sci(source);
  return r;
}

CriterionResult filter_oracles() {
  CriterionResult r;
  r.id = 7;
  r.title = "filter oracles";
  // Scalar Kalman recursion.
  double scalar = 0.0;
  {
    const double a = 0.9, c = 1.0, g = 0.7, q = 0.3, rv = 0.4;
    const Index steps = 40;
    std::vector<AffineStep> st(steps, AffineStep{Eigen::MatrixXd::Constant(1, 1, a), Eigen::VectorXd::Constant(1, c),
                                                 Eigen::MatrixXd::Constant(1, 1, g), Eigen::MatrixXd::Zero(1, 0)});
    const AffineModel model(st, std::vector<Eigen::MatrixXd>(steps + 1, Eigen::MatrixXd::Ones(1, 1)));
    const Eigen::MatrixXd y = 10.0 + test::gaussian(steps + 1, 1, 71).array();
    const NoiseConfig noise{Eigen::MatrixXd::Constant(1, 1, q), Eigen::MatrixXd::Constant(1, 1, rv), {}};
    const EstimatorResult out =
        run_estimator(model, y, noise, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 5.0));
    double x = 0.0, p = 5.0;
    for (Index k = 1; k <= steps; ++k) {
      const double xm = a * x + c, pm = a * a * p + g * g * q, gain = pm / (pm + rv);
      x = xm + gain * (y(k, 0) - xm);
      p = (1.0 - gain) * pm;
      scalar = std::max({scalar, std::abs(out.states[k][0] - x) / std::abs(x), std::abs(out.covariances[k](0, 0) - p) / p});
    }
  }
  // Model-generated noise-free data and covariance health on the nominal-size problem.
  double innovation = 0.0, sym = 0.0, min_eig = 1.0, fd = 0.0;
  {
    const Index n = 8, m = 3, steps = 100;
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<AffineStep> st;
    std::vector<Eigen::MatrixXd> outs;
    for (Index k = 0; k < steps; ++k) {
      AffineStep s{0.92 * Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n),
                   Eigen::MatrixXd::Zero(n, 0)};
      for (Index i = 0; i < n; ++i) {
        s.c[i] = u(rng);
        for (Index j = 0; j < n; ++j) s.a(i, j) += 0.04 * u(rng);
      }
      st.push_back(s);
    }
    for (Index k = 0; k <= steps; ++k) {
      Eigen::MatrixXd c(m, n);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) c(i, j) = u(rng);
      outs.push_back(c);
    }
    const AffineModel model(st, outs);
    Eigen::VectorXd x = 5.0 * test::gaussian(n, 1, 73).col(0);
    const Eigen::VectorXd x0 = x;
    Eigen::MatrixXd y(steps + 1, m);
    for (Index k = 0; k <= steps; ++k) {
      y.row(k) = (outs[k] * x).transpose();
      if (k < steps) x = st[k].a * x + st[k].c;
    }
    const EstimatorResult out =
        run_estimator(model, y, NoiseConfig::diagonal(n, 10.0, m, 0.1, 0, 0.0), x0, 10.0 * Eigen::MatrixXd::Identity(n, n));
    innovation = out.innovations.cwiseAbs().maxCoeff() / y.cwiseAbs().maxCoeff();
    for (const auto& p : out.covariances) {
      sym = std::max(sym, (p - p.transpose()).cwiseAbs().maxCoeff() / std::max(1.0, p.cwiseAbs().maxCoeff()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p, Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, eig.eigenvalues().minCoeff() / eig.eigenvalues().maxCoeff());
    }
    for (Index k = 0; k < steps; k += 25) {
      const Eigen::MatrixXd j =
          finite_difference_jacobian([&](const Eigen::VectorXd& v) { return model.propagate(k, v); }, x0);
      fd = std::max(fd, (j - st[k].a).cwiseAbs().maxCoeff() / st[k].a.cwiseAbs().maxCoeff());
    }
  }
  r.passed = scalar <= 1e-10 && innovation <= 1e-9 && sym <= 1e-10 && min_eig >= -1e-8 && fd <= 1e-5;
  r.detail = "scalar recursion " + sci(scalar) + "; noise-free innovation " + sci(innovation) + "; asymmetry " +
             sci(sym) + "; min eigenvalue " + sci(min_eig) + "; FD Jacobian " + sci(fd);
  return r;
}

CriterionResult pod_oracles() {
  CriterionResult r;
  r.id = 8;
  r.title = "POD oracles";
  const PodBasis b1 = pod_basis(test::gaussian(300, 50, 81), BasisRule::fixed(25));
  const double ortho = (b1.phi.transpose() * b1.phi - Eigen::MatrixXd::Identity(25, 25)).cwiseAbs().maxCoeff();

  const Eigen::VectorXd v = test::gaussian(60, 1, 82).col(0);
  const PodBasis b2 = pod_basis(v.replicate(1, 5), BasisRule::threshold(0.99));
  Eigen::VectorXd unit = v.normalized();
  Index big = 0;
  unit.cwiseAbs().maxCoeff(&big);
  if (unit[big] < 0.0) unit = -unit;
  double rank_one = b2.rank() == 1 ? (b2.phi.col(0) - unit).cwiseAbs().maxCoeff() : 1.0;
  rank_one = std::max(rank_one, b2.singular_values.tail(4).maxCoeff() / b2.singular_values[0]);

  const Eigen::MatrixXd q = test::gaussian(20, 6, 83);
  const PodBasis b3 = pod_basis(q, BasisRule::fixed(2));
  const Eigen::JacobiSVD<Eigen::MatrixXd> jac(q);
  const double best = jac.singularValues().tail(4).norm();
  const double gap = std::abs((q - b3.phi * (b3.phi.transpose() * q)).norm() - best) / best;

  r.passed = ortho <= 1e-10 && rank_one <= 1e-12 && gap <= 1e-10;
  r.detail = "orthonormality " + sci(ortho) + "; rank-one recovery " + sci(rank_one) + "; best rank-2 gap " + sci(gap);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string config = test::config_path("nominal.json");
  std::string work_dir = "acceptance_work";
  std::uint64_t seed = 0;
  app.add_option("--config", config);
  app.add_option("--work-dir", work_dir);
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  auto report = [&](const CriterionResult& r) {
    std::cout << format_result(r) << std::endl;
    failures += r.passed ? 0 : 1;
  };
  auto guarded = [&](int id, auto&& fn) {
    try {
      report(fn());
    } catch (const std::exception& e) {
      CriterionResult r;
      r.id = id;
      r.title = "error";
      r.detail = e.what();
      report(r);
    }
  };

  const ExperimentConfig cfg = load_experiment_config(config);
  const std::uint64_t s = seed ? seed : cfg.seed;
  EvaluationContext ctx(cfg);
  guarded(1, [&] { return criterion_pod_energy(ctx); });
  guarded(2, [&] { return criterion_rom_error(ctx); });
  guarded(3, [&] { return criterion_known_disturbance(ctx, s); });
  guarded(4, [&] { return criterion_disturbance_benefit(ctx, s); });
  guarded(5, [&] { return criterion_speedup(cfg); });
  guarded(6, fom_oracles);
  guarded(7, filter_oracles);
  guarded(8, pod_oracles);
  guarded(9, [&] { return criterion_reproducibility(cfg, work_dir, s); });
  std::cout << (failures ? "acceptance: FAILED (" + std::to_string(failures) + ")" : std::string("acceptance: all passed"))
            << std::endl;
  return failures ? 1 : 0;
}
