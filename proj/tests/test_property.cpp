// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/error.hpp"
#include "formtherm/property.hpp"

#include <doctest.h>

#include <cmath>

using namespace formtherm;

TEST_SUITE("property") {

TEST_CASE("linear cooling through M_s") {
  // Node 0 cools at 20 K/s, node 1 at 5 K/s, node 2 stays hot.
  std::vector<double> times;
  std::vector<Eigen::VectorXd> history;
  for (int k = 0; k <= 300; ++k) {
    const double t = 0.1 * k;
    times.push_back(t);
    history.push_back(Eigen::Vector3d(900.0 - 20.0 * t, 500.0 - 5.0 * t, 900.0));
  }
  const CoolingRateRule rule;
  const PropertyMap map = estimate_properties(history, times, rule);
  CHECK(map.crossing_time[0] == doctest::Approx((900.0 - 443.0) / 20.0));
  CHECK(map.crossing_time[1] == doctest::Approx((500.0 - 443.0) / 5.0));
  CHECK(map.cooling_rate[0] == doctest::Approx(20.0));
  CHECK(map.cooling_rate[1] == doctest::Approx(5.0));
  CHECK(map.classes[0] == PropertyClass::kHard);
  CHECK(map.classes[1] == PropertyClass::kSoft);
  CHECK(map.classes[2] == PropertyClass::kUndetermined);
  CHECK(map.values[0] == rule.hard_value);
  CHECK(map.values[1] == rule.soft_value);
  CHECK(map.values[2] == rule.soft_value);
  CHECK(std::isnan(map.crossing_time[2]));
  CHECK(classification_agreement(map, map) == 1.0);
}

TEST_CASE("model interface agrees with the free function") {
  std::vector<double> times{0.0, 0.5, 1.0, 1.5};
  std::vector<Eigen::VectorXd> history{Eigen::VectorXd::Constant(1, 470.0), Eigen::VectorXd::Constant(1, 450.0),
                                       Eigen::VectorXd::Constant(1, 440.0), Eigen::VectorXd::Constant(1, 430.0)};
  const CoolingRateModel model(CoolingRateRule{});
  const TimeGrid grid({0.5, 0.5, 0.5}, {Phase::kTransfer, Phase::kTransfer, Phase::kTransfer});
  const PropertyMap a = model.estimate(history, grid, ParameterTrajectory{});
  const PropertyMap b = estimate_properties(history, times, CoolingRateRule{});
  CHECK(a.crossing_time[0] == b.crossing_time[0]);
  // Crossing inside the second step; trailing window covers half a second.
  CHECK(a.crossing_time[0] == doctest::Approx(0.5 + 0.35));
  CHECK(a.cooling_rate[0] == doctest::Approx((470.0 - 14.0 - 443.0) / 0.5));
}

TEST_CASE("invalid rule and history") {
  CoolingRateRule bad;
  bad.window = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(estimate_properties({Eigen::VectorXd::Ones(1)}, {0.0, 1.0}, CoolingRateRule{}), ValidationError);
  CHECK_THROWS_AS(estimate_properties({Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)}, {0.0, 0.1},
                                      CoolingRateRule{}),
                  ValidationError);
}

}
