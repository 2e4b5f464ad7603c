// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/error.hpp"
#include "formtherm/material.hpp"

#include <doctest.h>

#include <cmath>

using namespace formtherm;

TEST_SUITE("material") {

TEST_CASE("piecewise-linear table interpolates and clamps") {
  const PiecewiseLinear f({300.0, 500.0, 900.0}, {10.0, 30.0, 10.0});
  CHECK(f(300.0) == 10.0);
  CHECK(f(400.0) == doctest::Approx(20.0));
  CHECK(f(700.0) == doctest::Approx(20.0));
  CHECK(f(100.0) == 10.0);
  CHECK(f(2000.0) == 10.0);
  CHECK(PiecewiseLinear()(123.0) == 0.0);
  CHECK(PiecewiseLinear::constant(4.0)(1e6) == 4.0);
  CHECK_THROWS_AS(PiecewiseLinear({1.0, 1.0}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(PiecewiseLinear({1.0, 2.0}, {0.0}), ValidationError);
}

TEST_CASE("material evaluation") {
  const MaterialModel m = MaterialModel::stainless_default();
  CHECK_NOTHROW(m.validate());
  const MaterialProperties p = material_eval(m, 823.0);
  CHECK(p.specific_heat == doctest::Approx(605.0));
  CHECK(p.conductivity == doctest::Approx(27.0));
  CHECK(p.induced_heat == 0.0);
  MaterialModel bad = MaterialModel::constant(7700.0, -1.0, 25.0);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("film coefficient") {
  FilmModel film;
  film.contact_h0 = 1000.0;
  film.contact_h_per_pa = 2e-4;
  film.convection = 20.0;
  film.emissivity = 0.5;
  CHECK(film_coefficient(film, 900.0, 350.0, 0.0, 1e7) == doctest::Approx(3000.0));
  const double t = 900.0, ti = 300.0;
  const double rad = 0.5 * 5.670374419e-8 * (t * t + ti * ti) * (t + ti);
  CHECK(film_coefficient(film, t, ti, 0.01, 1e7) == doctest::Approx(20.0 + rad));
  // Linearised radiation reproduces the Stefan-Boltzmann flux exactly.
  CHECK(rad * (t - ti) == doctest::Approx(0.5 * 5.670374419e-8 * (std::pow(t, 4) - std::pow(ti, 4))));
  film.emissivity = 1.5;
  CHECK_THROWS_AS(film.validate(), ValidationError);
}

}
