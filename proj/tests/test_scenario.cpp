// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/error.hpp"
#include "formtherm/fom.hpp"
#include "formtherm/scenario.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace formtherm;

TEST_SUITE("scenario") {

TEST_CASE("one slice per time point") {
  const Scenario sc = test::coarse_scenario();
  const ScenarioRun run = realize(sc, sc.reference);
  CHECK(run.parameters.size() == run.grid.steps() + 1);
  CHECK(run.parameters.node_count() == sc.mesh.node_count());
  CHECK_NOTHROW(run.parameters.validate(sc.mesh.node_count(), run.grid.steps() + 1));
}

TEST_CASE("configurations depend on the step index only") {
  const Scenario sc = test::coarse_scenario();
  const ScenarioRun a = realize(sc, ProcessInputs{1273.0, 80.0, 4.0});
  const ScenarioRun b = realize(sc, ProcessInputs{1073.0, 100.0, 5.0});
  for (Index k = 0; k < a.parameters.size(); k += 37) {
    CHECK((a.parameters[k].displacement - b.parameters[k].displacement).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.parameters[k].tool_distance - b.parameters[k].tool_distance).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("phase-wise contact") {
  const Scenario sc = test::coarse_scenario();
  const ScenarioRun run = realize(sc, sc.reference);
  const auto contact = [&](Index k) {
    return (run.parameters[k].tool_distance.array() <= sc.contact_threshold).count();
  };
  CHECK(contact(0) == 0);
  CHECK(contact(run.grid.first_step(Phase::kTransfer) + 10) == 0);
  const Index hold = run.grid.first_step(Phase::kHolding) + 5;
  CHECK(contact(hold) > 0);
  CHECK(contact(run.grid.steps()) == 0);
  // Free surfaces see the ambient, contacts the tool.
  const auto& p = run.parameters[hold];
  for (Index i = 0; i < p.node_count(); ++i) {
    if (p.tool_distance[i] <= sc.contact_threshold) {
      CHECK(p.contact_temperature[i] == sc.tool.tool_temperature);
      CHECK(p.contact_pressure[i] > 0.0);
    } else {
      CHECK(p.contact_temperature[i] == sc.tool.ambient_temperature);
    }
  }
}

TEST_CASE("sensors map to nearby deformed nodes") {
  const Scenario sc = test::coarse_scenario();
  const ScenarioRun run = realize(sc, sc.reference);
  const auto& disp = run.parameters[run.grid.steps()].displacement;
  const SensorSelection sel = output_matrix(sc.sensors, sc.mesh, disp);
  REQUIRE(sel.rows() == 2);
  SensorConfig far = sc.sensors;
  far.positions = {Eigen::Vector3d(0.0, 0.0, 0.5)};
  far.max_distance = 0.01;
  CHECK_THROWS_AS(output_matrix(far, sc.mesh, disp), ValidationError);
}

}
