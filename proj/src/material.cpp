// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/material.hpp"

#include "formtherm/error.hpp"

#include <algorithm>
#include <cmath>

namespace formtherm {

PiecewiseLinear::PiecewiseLinear(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw ValidationError("table knots and values differ in length");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw ValidationError("table entries must be finite");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw ValidationError("table knots must be strictly increasing");
  }
}

double PiecewiseLinear::operator()(double x) const {
  if (x_.empty()) return 0.0;
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - x_.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - x_[lo]) / (x_[hi] - x_[lo]);
  return (1.0 - w) * y_[lo] + w * y_[hi];
}

MaterialModel MaterialModel::stainless_default() {
  MaterialModel m;
  m.density = 7700.0;
  m.specific_heat = PiecewiseLinear({293.0, 673.0, 973.0, 1273.0, 1473.0}, {460.0, 560.0, 650.0, 630.0, 650.0});
  m.conductivity = PiecewiseLinear({293.0, 673.0, 973.0, 1273.0, 1473.0}, {25.0, 26.5, 27.5, 29.0, 30.0});
  return m;
}

MaterialModel MaterialModel::constant(double density, double specific_heat, double conductivity) {
  MaterialModel m;
  m.density = density;
  m.specific_heat = PiecewiseLinear::constant(specific_heat);
  m.conductivity = PiecewiseLinear::constant(conductivity);
  return m;
}

void MaterialModel::validate() const {
  if (!(density > 0.0)) throw ValidationError("density must be positive");
  if (specific_heat.empty() || conductivity.empty())
    throw ValidationError("specific heat and conductivity tables must not be empty");
  for (double v : specific_heat.values())
    if (!(v > 0.0)) throw ValidationError("specific heat must be positive");
  for (double v : conductivity.values())
    if (!(v > 0.0)) throw ValidationError("conductivity must be positive");
}

MaterialProperties material_eval(const MaterialModel& material, double temperature) {
  return {material.specific_heat(temperature), material.conductivity(temperature),
          material.induced_heat(temperature)};
}

void FilmModel::validate() const {
  if (!(contact_h0 >= 0.0) || !(contact_h_per_pa >= 0.0) || !(convection >= 0.0))
    throw ValidationError("film coefficients must be non-negative");
  if (!(emissivity >= 0.0 && emissivity <= 1.0)) throw ValidationError("emissivity must lie in [0, 1]");
  if (!(contact_threshold >= 0.0)) throw ValidationError("contact threshold must be non-negative");
}

double film_coefficient(const FilmModel& film, double temperature, double contact_temperature,
                        double tool_distance, double contact_pressure) {
  if (tool_distance <= film.contact_threshold)
    return film.contact_h0 + film.contact_h_per_pa * contact_pressure;
  const double t = temperature, ti = contact_temperature;
  return film.convection + film.emissivity * kStefanBoltzmann * (t * t + ti * ti) * (t + ti);
}

}  // namespace formtherm
