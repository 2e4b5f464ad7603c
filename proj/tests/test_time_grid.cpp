// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/error.hpp"
#include "formtherm/time_grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace formtherm;

TEST_SUITE("time_grid") {

TEST_CASE("template phases and durations") {
  const PhaseTemplate t = hole_flanging_template();
  REQUIRE(t.size() == 510);
  const TimeGrid g = build_time_grid(510, ProcessInputs{}, ProcessInputs{}, t);
  CHECK(g.steps() == 510);
  CHECK(g.step_count(Phase::kTransfer) == 150);
  CHECK(g.step_count(Phase::kForming) == 130);
  CHECK(g.step_count(Phase::kHolding) == 130);
  CHECK(g.step_count(Phase::kDemoulding) == 100);
  CHECK(g.duration(Phase::kTransfer) == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(g.duration(Phase::kForming) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(g.duration(Phase::kHolding) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(g.end_time() == doctest::Approx(13.0).epsilon(1e-12));
  for (Index k = 0; k < g.steps(); ++k) CHECK(g.time(k + 1) == doctest::Approx(g.time(k) + g.step_size(k)));
}

TEST_CASE("inputs rescale forming and holding only") {
  const PhaseTemplate t = hole_flanging_template();
  const ProcessInputs ref{};
  ProcessInputs u{1173.0, 100.0, 6.0};
  const TimeGrid g = build_time_grid(510, u, ref, t);
  CHECK(g.steps() == 510);
  CHECK(g.duration(Phase::kForming) == doctest::Approx(1.5 * 80.0 / 100.0).epsilon(1e-12));
  CHECK(g.duration(Phase::kHolding) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(g.duration(Phase::kTransfer) == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(g.duration(Phase::kDemoulding) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("invalid inputs") {
  const PhaseTemplate t = hole_flanging_template();
  CHECK_THROWS_AS(build_time_grid(510, ProcessInputs{1273.0, 0.0, 4.0}, ProcessInputs{}, t), ValidationError);
  CHECK_THROWS_AS(build_time_grid(510, ProcessInputs{1273.0, 80.0, -1.0}, ProcessInputs{}, t), ValidationError);
  CHECK_THROWS_AS(build_time_grid(400, ProcessInputs{}, ProcessInputs{}, t), ValidationError);
  CHECK_THROWS_AS(phase_from_string("annealing"), ValidationError);
  CHECK(phase_from_string(to_string(Phase::kHolding)) == Phase::kHolding);
}

}
