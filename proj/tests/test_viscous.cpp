// Copyright 2026 The Shockline Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shockline/error.hpp"
#include "shockline/front_tracking.hpp"
#include "shockline/viscous.hpp"

using namespace shockline;

namespace {

double l1_to_step(const GridField& g, const StepFunction& s) {
  const auto& u = g.level(g.level_count() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    double a = g.x_min() + static_cast<double>(i) * g.dx();
    // Exact integral of |u_i - s| over the cell.
    StepFunction cell = StepFunction::constant(u[i]);
    total += l1_distance(cell, s, a, a + g.dx());
  }
  return total;
}

}  // namespace

TEST_CASE("engquist-osher flux") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  // Concave with maximum at 1/2: F(u, v) = f(min(u, 1/2)) + f(max(v, 1/2)) - f(1/2).
  for (double u : {0.0, 0.2, 0.5, 0.7, 1.0}) {
    for (double v : {0.0, 0.1, 0.5, 0.8, 1.0}) {
      double expect = f(std::min(u, 0.5)) + f(std::max(v, 0.5)) - f(0.5);
      CHECK(engquist_osher(f, u, v) == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(engquist_osher(f, u, u) == doctest::Approx(f(u)));
  }
}

TEST_CASE("constant data is a fixed point") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  GridField g = solve_viscous(StepFunction::constant(0.35), f, 0.05, {-2.0, 2.0, 200}, 1.0);
  for (std::size_t k = 0; k < g.level_count(); ++k) {
    for (double v : g.level(k)) CHECK(v == doctest::Approx(0.35).epsilon(1e-14));
  }
  Trajectory z = track_smooth(g, VelocityFunction::linear_traffic(), -1.0, 0.0, 1.0);
  CHECK(z.at(1.0) == doctest::Approx(-1.0 + 0.65).epsilon(1e-12));
}

TEST_CASE("riemann data: monotone profile, conservation, bounds") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  StepFunction init({0.0}, {0.8, 0.2});
  GridField g = solve_viscous(init, f, 0.5, {-4.0, 4.0, 400}, 1.0);
  const double m0 = g.mass(0);
  for (std::size_t k = 0; k < g.level_count(); ++k) {
    const auto& u = g.level(k);
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(u[i] <= 0.8 + 1e-8);
      CHECK(u[i] >= 0.2 - 1e-8);
      if (i > 0) CHECK(u[i] <= u[i - 1] + 1e-14);
    }
    CHECK(std::abs(g.mass(k) + g.boundary_outflow(k) - m0) <= 1e-8);
  }
}

TEST_CASE("stability bound is enforced") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  StepFunction init({0.0}, {0.8, 0.2});
  double dx = 8.0 / 400;
  double dt = stable_time_step(f, 0.1, dx);
  CHECK(dt <= 0.9 * std::min(dx / 2.0, dx * dx / 0.2));
  CHECK(dt * (1.0 / dx + 0.2 / (dx * dx)) <= 0.9 + 1e-15);
  ViscousOptions bad;
  bad.dt = 2.0 * dt;
  CHECK_THROWS_AS(solve_viscous(init, f, 0.1, {-4.0, 4.0, 400}, 1.0, bad), ConfigError);
  ViscousOptions ok;
  ok.dt = dt;
  CHECK_NOTHROW(solve_viscous(init, f, 0.1, {-4.0, 4.0, 400}, 0.1, ok));
  CHECK_THROWS_AS(solve_viscous(init, f, 0.0, {-4.0, 4.0, 400}, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_viscous(StepFunction({5.0}, {0.1, 0.2}), f, 0.1, {-4.0, 4.0, 400}, 1.0),
                  ConfigError);
}

TEST_CASE("vanishing viscosity approaches the entropy solution") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  StepFunction init({0.0}, {0.2, 0.8});
  FrontTrackingSolution exact = evolve(init, piecewise_linearize(f, 12), 1.0);
  StepFunction target = slice(exact, 1.0);
  double previous = INFINITY;
  for (double eps : {0.1, 0.05, 0.025}) {
    GridField g = solve_viscous(init, f, eps, {-3.0, 3.0, 1200}, 1.0);
    double d = l1_to_step(g, target);
    CHECK(d < previous);
    previous = d;
  }
}

TEST_CASE("smooth trajectories converge to the Filippov path") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  VelocityFunction w = VelocityFunction::linear_traffic();
  StepFunction init({0.0}, {0.2, 0.8});
  const double T = 2.0;
  FrontTrackingSolution exact = evolve(init, piecewise_linearize(f, 10), T);
  Trajectory oracle = track(exact, w, -0.8, 0.25, T);
  double previous = INFINITY;
  for (double eps : {0.1, 0.05, 0.025}) {
    GridField g = solve_viscous(init, f, eps, default_grid(init, f, w, eps, T, 1000), T);
    Trajectory z = track_smooth(g, w, -0.8, 0.25, T);
    double d = sup_distance(z, oracle);
    CHECK(d < previous);
    previous = d;
  }
  GridField g = solve_viscous(init, f, 0.1, {-1.0, 1.0, 100}, T);
  CHECK_THROWS_AS(track_smooth(g, w, 0.9, 0.0, T), SolverError);
  CHECK_THROWS_AS(track_smooth(g, w, 1.5, 0.0, T), PreconditionError);
}
