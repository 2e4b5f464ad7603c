// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/config.hpp"
#include "formtherm/error.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace formtherm;
namespace fs = std::filesystem;

namespace {

std::string write(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "formtherm_config_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("nominal experiment") {
  const ExperimentConfig c = load_experiment_config(test::config_path("nominal.json"));
  CHECK(c.name == "nominal");
  const std::vector<RunSpec> sweep = c.sweep.expand();
  CHECK(sweep.size() == 12);
  CHECK(sweep.front().id == "sweep_T1073_v80_h4");
  CHECK(c.excitation.size() == 2);
  CHECK(c.rom.rule.rank.value() == 30);
  CHECK(c.plant.run.disturbance.at(10.0)[0] == 1000.0);
  CHECK(c.plant.run.disturbance.at(11.0)[0] == 0.0);
  CHECK(c.scenario.disturbance.unit == 1e6);
  CHECK(c.scenario.scenario.mesh.node_count() > 2000);
  CHECK(c.supporting().t_aust_avg == 1273.0);
  REQUIRE(c.evaluation.latent_plant.has_value());
  CHECK(c.evaluation.latent_plant->induced_heat.has_value());
  CHECK(fs::path(c.evaluation.speed_scenario).is_absolute());
}

TEST_CASE("comments are allowed and paths resolve against the file") {
  const std::string scen = write("s.json", R"({
    // coarse
    "resolution": 0.05,
    "sensors": {"positions": [[0.11, 0, 0]], "max_distance": 0.1}
  })");
  const std::string exp = write("e.json", R"({"scenario": "s.json", "sweep": {"t_aust_avg": [1273], "v_punch": [80], "t_hold": [4]}})");
  const ExperimentConfig c = load_experiment_config(exp);
  CHECK(c.scenario.scenario.resolution == 0.05);
  CHECK(c.scenario.scenario.sensors.count() == 1);
  CHECK(c.sweep.expand().size() == 1);
}

TEST_CASE("malformed configuration is rejected") {
  CHECK_THROWS_AS(load_experiment_config(write("a.json", "{ not json")), ValidationError);
  CHECK_THROWS_AS(load_experiment_config(write("b.json", R"({"scenario": "missing.json"})")), ValidationError);
  const std::string bad_scen = write("c.json", R"({"resolution": -1.0})");
  CHECK_THROWS_AS(load_scenario_config(bad_scen), ValidationError);
  const std::string bad_region = write("d.json", R"({"disturbance": {"regions": [{"kind": "moon"}]}})");
  CHECK_THROWS_AS(load_scenario_config(bad_region), ValidationError);
  CHECK_THROWS_AS(load_scenario_config(write("e.json", R"({"sensors": {"positions": [[0.11, 0]]}})")), ValidationError);
}

TEST_CASE("disturbance signal text") {
  const DisturbanceSignal d = parse_disturbance_signal(R"([{"start": 1, "end": 2, "value": 5}, {"start": 1.5, "end": 3, "value": 1}])", 1);
  CHECK(d.at(1.7)[0] == 6.0);
  CHECK(d.at(2.5)[0] == 1.0);
  CHECK_THROWS_AS(parse_disturbance_signal(R"([{"start": 2, "end": 1, "value": 5}])", 1), ValidationError);
}

}
