// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/scenario.hpp"
#include "formtherm/trajectory.hpp"

#include <Eigen/Core>

#include <random>
#include <string>

namespace test {

inline std::string config_path(const std::string& name) { return std::string(FORMTHERM_CONFIG_DIR) + "/" + name; }

// Coarse hole-flanging scenario with one sensor on the collar.
inline formtherm::Scenario coarse_scenario(double resolution = 0.03) {
  formtherm::Scenario sc;
  sc.resolution = resolution;
  sc.phase_template = formtherm::hole_flanging_template();
  sc.sensors.positions = {Eigen::Vector3d(0.11, 0.0, 0.0), Eigen::Vector3d(-0.2, 0.0, 0.0)};
  sc.sensors.max_distance = 0.1;
  formtherm::build_mesh(sc);
  return sc;
}

// Free surface at temperature t_inf, far from the tools.
inline formtherm::ParameterSlice free_slice(formtherm::Index n, double t_inf) {
  formtherm::ParameterSlice p = formtherm::ParameterSlice::zeros(n);
  p.tool_distance.setConstant(0.01);
  p.contact_temperature.setConstant(t_inf);
  return p;
}

inline Eigen::MatrixXd gaussian(formtherm::Index rows, formtherm::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (formtherm::Index j = 0; j < cols; ++j)
    for (formtherm::Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

}  // namespace test
