// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace formtherm {

/// Piecewise-linear table y(x) with knots sorted by x, clamped to the end
/// values outside the tabulated range. An empty table evaluates to zero.
class PiecewiseLinear {
public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> x, std::vector<double> y);
  static PiecewiseLinear constant(double value) { return PiecewiseLinear({0.0}, {value}); }

  double operator()(double x) const;
  bool empty() const { return x_.empty(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

private:
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Thermophysical properties of the blank. Density is constant; specific heat,
/// conductivity and the induced heat source depend on temperature.
struct MaterialModel {
  double density = 7700.0;         // [kg/m^3]
  PiecewiseLinear specific_heat;   // c_p(T) [J/(kg K)]
  PiecewiseLinear conductivity;    // lambda(T) [W/(m K)]
  PiecewiseLinear induced_heat;    // g(T) [W/m^3], empty = no source

  /// Martensitic stainless steel, representative values (not a certified card).
  static MaterialModel stainless_default();
  /// Temperature-independent properties.
  static MaterialModel constant(double density, double specific_heat, double conductivity);

  /// Throws ValidationError unless rho > 0 and c_p, lambda > 0 at every knot.
  void validate() const;
};

struct MaterialProperties {
  double specific_heat;
  double conductivity;
  double induced_heat;
};

/// Interpolated properties at temperature T (clamped outside the tables).
MaterialProperties material_eval(const MaterialModel& material, double temperature);

/// Heat transfer coefficient of the sheet surface. In contact (delta <= delta_c)
/// an affine pressure law applies; otherwise convection plus linearised
/// radiation towards T_inf.
struct FilmModel {
  double contact_h0 = 1500.0;           // [W/(m^2 K)]
  double contact_h_per_pa = 1.0e-4;     // [W/(m^2 K Pa)]
  double convection = 15.0;             // [W/(m^2 K)]
  double emissivity = 0.6;              // [-]
  double contact_threshold = 1.0e-6;    // delta_c [m]
  bool rim_exchange = true;             // exchange over the lateral rim faces

  void validate() const;
};

inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // [W/(m^2 K^4)]

double film_coefficient(const FilmModel& film, double temperature, double contact_temperature,
                        double tool_distance, double contact_pressure);

}  // namespace formtherm
