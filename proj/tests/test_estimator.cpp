// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/discrete_model.hpp"
#include "formtherm/ekf.hpp"
#include "formtherm/error.hpp"

#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace formtherm;

namespace {

AffineModel scalar_model(double a, double c, double g, Index steps) {
  std::vector<AffineStep> st(steps, AffineStep{Eigen::MatrixXd::Constant(1, 1, a), Eigen::VectorXd::Constant(1, c),
                                               Eigen::MatrixXd::Constant(1, 1, g), Eigen::MatrixXd::Zero(1, 0)});
  return AffineModel(st, std::vector<Eigen::MatrixXd>(steps + 1, Eigen::MatrixXd::Ones(1, 1)));
}

AffineModel random_model(Index n, Index m, Index steps, Index nd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<AffineStep> st;
  std::vector<Eigen::MatrixXd> outs;
  for (Index k = 0; k < steps; ++k) {
    AffineStep s{0.9 * Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd(n), 0.5 * Eigen::MatrixXd::Identity(n, n),
                 Eigen::MatrixXd(n, nd)};
    for (Index i = 0; i < n; ++i) {
      s.c[i] = u(rng);
      for (Index j = 0; j < n; ++j) s.a(i, j) += 0.05 * u(rng);
      for (Index j = 0; j < nd; ++j) s.b_d(i, j) = u(rng);
    }
    st.push_back(s);
  }
  for (Index k = 0; k <= steps; ++k) {
    Eigen::MatrixXd c(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) c(i, j) = u(rng);
    outs.push_back(c);
  }
  return AffineModel(st, outs);
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("scalar model matches the textbook Kalman recursion") {
  const double a = 0.95, c = 0.3, g = 0.5, q = 0.2, r = 0.5;
  const Index steps = 60;
  const AffineModel model = scalar_model(a, c, g, steps);
  Eigen::MatrixXd y(steps + 1, 1);
  for (Index k = 0; k <= steps; ++k) y(k, 0) = 5.0 + std::cos(0.3 * static_cast<double>(k));
  NoiseConfig noise{Eigen::MatrixXd::Constant(1, 1, q), Eigen::MatrixXd::Constant(1, 1, r), {}};
  for (bool joseph : {false, true}) {
    const EstimatorResult out =
        run_estimator(model, y, noise, Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 2.0), {joseph});
    double x = 1.0, p = 2.0;
    for (Index k = 1; k <= steps; ++k) {
      const double xm = a * x + c, pm = a * a * p + g * g * q;
      const double gain = pm / (pm + r);
      x = xm + gain * (y(k, 0) - xm);
      p = (1.0 - gain) * pm;
      CHECK(out.states[k][0] == doctest::Approx(x).epsilon(1e-12));
      CHECK(out.covariances[k](0, 0) == doctest::Approx(p).epsilon(1e-12));
      CHECK(out.innovations(k, 0) == doctest::Approx(y(k, 0) - xm).epsilon(1e-12));
    }
  }
}

TEST_CASE("noise-free data generated by the model gives zero innovations") {
  const AffineModel model = random_model(5, 2, 80, 0, 31);
  Eigen::VectorXd x = 10.0 * test::gaussian(5, 1, 32).col(0);
  const Eigen::VectorXd x0 = x;
  Eigen::MatrixXd y(81, 2);
  for (Index k = 0; k <= 80; ++k) {
    y.row(k) = (model.output(k) * x).transpose();
    if (k < 80) x = model.propagate(k, x);
  }
  const EstimatorResult out =
      run_estimator(model, y, NoiseConfig::diagonal(5, 0.3, 2, 0.1, 0, 0.0), x0, Eigen::MatrixXd::Identity(5, 5));
  CHECK(out.innovations.cwiseAbs().maxCoeff() <= 1e-9 * y.cwiseAbs().maxCoeff());
  CHECK((out.states.back() - x).cwiseAbs().maxCoeff() <= 1e-9 * x.norm());
}

TEST_CASE("covariance stays symmetric positive definite over a long noisy run") {
  const AffineModel base = random_model(6, 2, 300, 1, 33);
  const AffineModel model = augment(base);
  const Eigen::MatrixXd y = 100.0 * test::gaussian(301, 2, 34);
  const EstimatorResult out = run_estimator(model, y, NoiseConfig::diagonal(6, 10.0, 2, 0.1, 1, 100.0),
                                            Eigen::VectorXd::Zero(7), 10.0 * Eigen::MatrixXd::Identity(7, 7));
  for (std::size_t k = 0; k < out.covariances.size(); ++k) {
    const Eigen::MatrixXd& p = out.covariances[k];
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, p.cwiseAbs().maxCoeff()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * eig.eigenvalues().maxCoeff());
  }
}

TEST_CASE("augmentation has the random-walk block structure") {
  const AffineModel base = random_model(3, 2, 4, 2, 35);
  const AffineModel aug = augment(base);
  REQUIRE(aug.state_size() == 5);
  CHECK(aug.disturbance_size() == 2);
  for (Index k = 0; k < 4; ++k) {
    const Eigen::MatrixXd a = aug.jacobian(k, Eigen::VectorXd::Zero(5));
    CHECK(a.topLeftCorner(3, 3) == base.at(k).a);
    CHECK(a.topRightCorner(3, 2) == base.at(k).b_d);
    CHECK(a.bottomLeftCorner(2, 3).isZero(0.0));
    CHECK(a.bottomRightCorner(2, 2) == Eigen::MatrixXd::Identity(2, 2));
    const Eigen::MatrixXd g = aug.noise_jacobian(k, Eigen::VectorXd::Zero(5));
    CHECK(g.topLeftCorner(3, 3) == base.at(k).g);
    CHECK(g.bottomRightCorner(2, 2) == Eigen::MatrixXd::Identity(2, 2));
    CHECK(g.topRightCorner(3, 2).isZero(0.0));
  }
  const Eigen::MatrixXd c = aug.output(2);
  CHECK(c.leftCols(3) == base.output(2));
  CHECK(c.rightCols(2).isZero(0.0));
}

TEST_CASE("finite differences reproduce analytic Jacobians") {
  const AffineModel model = random_model(4, 2, 5, 0, 36);
  const Eigen::VectorXd x = test::gaussian(4, 1, 37).col(0);
  for (Index k = 0; k < 5; ++k) {
    const Eigen::MatrixXd j = finite_difference_jacobian([&](const Eigen::VectorXd& v) { return model.propagate(k, v); }, x);
    CHECK((j - model.at(k).a).cwiseAbs().maxCoeff() <= 1e-5 * model.at(k).a.cwiseAbs().maxCoeff());
  }
  const auto square = [](const Eigen::VectorXd& v) { return Eigen::VectorXd(v.array().square()); };
  const Eigen::MatrixXd j = finite_difference_jacobian(square, Eigen::Vector2d(3.0, -2.0));
  CHECK(j(0, 0) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(j(1, 1) == doctest::Approx(-4.0).epsilon(1e-8));
  CHECK(std::abs(j(0, 1)) <= 1e-8);
}

TEST_CASE("singular innovation covariance is regularised once") {
  EkfState prior{Eigen::Vector2d(1.0, 2.0), Eigen::Matrix2d::Zero(), 3};
  prior.p(0, 0) = 1.0;
  Eigen::MatrixXd c(2, 2);
  c << 1, 0, 2, 0;
  const EkfUpdate u = ekf_update(prior, Eigen::Vector2d(2.0, 4.0), c, Eigen::MatrixXd::Zero(2, 2));
  CHECK(u.jittered);
  CHECK(u.posterior.x.allFinite());
  const EkfUpdate v = ekf_update(prior, Eigen::Vector2d(2.0, 4.0), Eigen::MatrixXd::Identity(2, 2),
                                 Eigen::MatrixXd::Identity(2, 2));
  CHECK(!v.jittered);
}

TEST_CASE("invalid estimator inputs") {
  const AffineModel model = scalar_model(0.9, 0.0, 1.0, 5);
  const NoiseConfig noise{Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1), {}};
  Eigen::MatrixXd y = Eigen::MatrixXd::Ones(6, 1);
  CHECK_THROWS_AS(run_estimator(model, y, noise, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)),
                  ValidationError);
  CHECK_THROWS_AS(run_estimator(model, Eigen::MatrixXd::Ones(6, 2), noise, Eigen::VectorXd::Zero(1),
                                Eigen::MatrixXd::Identity(1, 1)),
                  ValidationError);
  const NoiseConfig bad{-Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1), {}};
  CHECK_THROWS_AS(run_estimator(model, y, bad, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)),
                  ValidationError);
  y(3, 0) = std::nan("");
  CHECK_THROWS_AS(run_estimator(model, y, noise, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)),
                  ValidationError);
  // A short measurement stream yields a partial result.
  const EstimatorResult part = run_estimator(model, Eigen::MatrixXd::Ones(3, 1), noise, Eigen::VectorXd::Zero(1),
                                             Eigen::MatrixXd::Identity(1, 1));
  CHECK(part.partial);
  CHECK(part.size() == 3);
}

TEST_CASE("observability of a fully measured system") {
  const AffineModel model = scalar_model(0.9, 0.0, 1.0, 10);
  CHECK(observability_margin(model, Eigen::VectorXd::Zero(1), 0, 5) ==
        doctest::Approx(1.0 + 0.81 + std::pow(0.81, 2) + std::pow(0.81, 3) + std::pow(0.81, 4) + std::pow(0.81, 5)));
}

}
