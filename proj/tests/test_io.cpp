// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/container.hpp"
#include "formtherm/csv.hpp"
#include "formtherm/error.hpp"
#include "formtherm/trajectory.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace formtherm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "formtherm_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("numbers round-trip through their text form") {
  for (double v : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -273.15,
                   std::numeric_limits<double>::max(), std::numeric_limits<double>::denorm_min()}) {
    const std::string s = format_number(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("csv writer emits comments, header and rows") {
  const fs::path p = scratch("t.csv");
  {
    CsvWriter csv(p.string(), {"unit test", "x [m]"}, {"id", "x", "y"});
    csv.row({"a"}, std::vector<double>{1.0, 0.25});
    csv.close();
  }
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "# unit test\n# x [m]\nid,x,y\na,1,0.25\n");
  CsvWriter short_row(scratch("u.csv").string(), {}, {"a", "b"});
  CHECK_THROWS_AS(short_row.row({1.0}), ValidationError);
}

TEST_CASE("state trajectory round trip is bitwise") {
  StateTrajectory t;
  const Eigen::MatrixXd data = test::gaussian(17, 5, 3);
  for (Index k = 0; k < 5; ++k) t.temperatures.push_back(1000.0 * data.col(k));
  t.readings = test::gaussian(5, 2, 4);
  const fs::path p = scratch("s.ftc");
  save_state_trajectory(p.string(), t);
  const StateTrajectory u = load_state_trajectory(p.string(), 17, 5);
  REQUIRE(u.size() == 5);
  for (Index k = 0; k < 5; ++k) CHECK((u[k].array() == t[k].array()).all());
  CHECK((u.readings.array() == t.readings.array()).all());
  CHECK_THROWS_AS(load_state_trajectory(p.string(), 18), FormatError);
  CHECK_THROWS_AS(load_state_trajectory(p.string(), 17, 6), FormatError);
}

TEST_CASE("truncated and foreign containers are rejected") {
  StateTrajectory t;
  t.temperatures = {Eigen::VectorXd::Ones(50), Eigen::VectorXd::Zero(50)};
  const fs::path p = scratch("cut.ftc");
  save_state_trajectory(p.string(), t);
  fs::resize_file(p, fs::file_size(p) - 8);
  CHECK_THROWS_AS(load_state_trajectory(p.string()), FormatError);
  const fs::path q = scratch("junk.ftc");
  std::ofstream(q) << "not a container";
  CHECK_THROWS_AS(load_state_trajectory(q.string()), FormatError);
}

}
