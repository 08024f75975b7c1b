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

#include <cmath>
#include <random>

#include "generators.hpp"
#include "shockline/error.hpp"
#include "shockline/experiments.hpp"

using namespace shockline;
using shockline::testing::uniform;

namespace {

StepFunction five_jumps() {
  return StepFunction({-1.0, -0.5, 0.0, 0.5, 1.0}, {0.25, 0.5, 0.375, 0.75, 0.5, 0.3125});
}

std::vector<double> ladder(int from, int to) {
  std::vector<double> eps;
  for (int k = from; k <= to; ++k) eps.push_back(std::ldexp(1.0, -k));
  return eps;
}

}  // namespace

TEST_CASE("fit_rate recovers exact power laws") {
  std::vector<double> eps{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> root;
  std::vector<double> lin;
  std::vector<double> flat;
  for (double e : eps) {
    root.push_back(std::sqrt(e));
    lin.push_back(3.0 * e);
    flat.push_back(0.2);
  }
  CHECK(fit_rate(eps, root).slope == doctest::Approx(0.5).epsilon(1e-12));
  RateFit l = fit_rate(eps, lin);
  CHECK(l.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(l.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(fit_rate(eps, flat).slope) < 1e-12);

  std::vector<double> tiny{1.0, 1.0, 1e-13, 0.0};
  CHECK_THROWS_AS(fit_rate(eps, tiny), FitError);
  CHECK_THROWS_AS(fit_rate({0.5, 0.25}, {1.0, 0.5}), FitError);
  CHECK_THROWS_AS(fit_rate({0.5}, {1.0, 0.5}), PreconditionError);
}

TEST_CASE("initial perturbations have the requested window norm") {
  StepFunction rho0 = five_jumps();
  for (auto kind : {InitialPerturbation::JumpShift, InitialPerturbation::HeightDither,
                    InitialPerturbation::AddedStep}) {
    CAPTURE(to_string(kind));
    for (double eps : {0.125, 0.01, 1e-4}) {
      StepFunction r = perturb_initial(rho0, kind, eps, 0.25, -3.0);
      CHECK(l1_distance(rho0, r, -4.0, 6.0) == doctest::Approx(eps).epsilon(1e-10));
      CHECK(r.min_value() >= 0.25);
      CHECK(r.max_value() <= 1.0);
    }
    StepFunction same = perturb_initial(rho0, kind, 0.0, 0.25, 0.0);
    CHECK(l1_distance(rho0, same, -4.0, 6.0) == 0.0);
  }
  // Near the top of the range the added step goes down instead.
  StepFunction high({0.0}, {1.0, 0.5});
  StepFunction r = perturb_initial(high, InitialPerturbation::AddedStep, 0.1, 0.25, -2.0);
  CHECK(r(-1.5) == doctest::Approx(0.9));
  CHECK_THROWS_AS(perturb_initial(StepFunction({0.0}, {0.3, 0.6}),
                                  InitialPerturbation::HeightDither, 0.1, 0.25, 0.0),
                  ConfigError);
  CHECK_THROWS_AS(perturb_initial(StepFunction::constant(0.1), InitialPerturbation::AddedStep,
                                  0.1, 0.25, 0.0),
                  ConfigError);
}

TEST_CASE("velocity perturbations stay admissible at Lipschitz distance eps") {
  VelocityFunction w = VelocityFunction::linear_traffic();
  for (auto kind : {VelocityPerturbation::Scale, VelocityPerturbation::Smooth}) {
    CAPTURE(to_string(kind));
    for (double eps : {0.25, 0.01}) {
      VelocityFunction wb = perturb_velocity(w, kind, eps);
      CHECK(wb.in_admissible_class());
      CHECK(lipschitz_distance(w, wb) == doctest::Approx(eps).epsilon(1e-9));
    }
  }
  VelocityFunction t = VelocityFunction::table({0.0, 0.5, 1.0}, {2.0, 0.5, 0.0});
  VelocityFunction tb = perturb_velocity(t, VelocityPerturbation::Scale, 0.3);
  CHECK(lipschitz_distance(t, tb) == doctest::Approx(0.3));
}

TEST_CASE("stability constants") {
  CHECK(initial_stability_constant(2.0, 0.25, 0.25, 1.0, 1.0, 1.0) == doctest::Approx(24.75));
  CHECK(velocity_stability_constant(2.0, 0.25, 0.25, 1.0, 1.0) == doctest::Approx(40.5));
}

TEST_CASE("single shifted shock matches the closed form") {
  InitialStabilityConfig c;
  c.rho0 = StepFunction({0.0}, {0.2, 0.8});
  c.family = InitialPerturbation::JumpShift;
  c.eps = {0.06, 0.03, 0.006, 0.0};
  c.x0 = -0.8;
  c.t0 = 0.25;
  c.T = 2.0;
  RateReport r = initial_field_stability(c);
  CHECK(r.hypotheses_ok);
  CHECK(r.bound_ok);
  CHECK(r.errors.back() == 0.0);
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    RiemannComparison rc;
    rc.w = rc.w_bar = c.w;
    rc.rho_l = rc.rho_bar_l = 0.2;
    rc.rho_r = rc.rho_bar_r = 0.8;
    rc.a = 0.0;
    rc.a_bar = c.eps[i] / 0.6;
    rc.z0 = rc.z_bar0 = -0.8 - 0.8 * 0.25;
    rc.t0 = 0.0;
    CHECK(r.errors[i] == doctest::Approx(std::abs(riemann_comparison(rc, c.T))).epsilon(1e-9));
  }
}

TEST_CASE("initial-field bound on a five-jump datum") {
  InitialStabilityConfig c;
  c.rho0 = five_jumps();
  c.eps = ladder(3, 7);
  c.x0 = -1.25;
  c.anchor = -3.0;
  for (auto kind : {InitialPerturbation::JumpShift, InitialPerturbation::HeightDither,
                    InitialPerturbation::AddedStep}) {
    CAPTURE(to_string(kind));
    c.family = kind;
    RateReport r = initial_field_stability(c);
    CHECK(r.hypotheses_ok);
    CHECK(r.bound_ok);
    CHECK(r.constant > 1.0);
    for (double e : r.errors) CHECK(e >= 0.0);
  }
  c.eps = {0.1, 0.2};
  CHECK_THROWS_AS(initial_field_stability(c), ConfigError);
  c.eps = {0.1};
  c.rho0 = StepFunction({0.0}, {0.0, 0.5});
  CHECK_THROWS_AS(initial_field_stability(c), ConfigError);
}

TEST_CASE("velocity stability examples") {
  FluxStabilityConfig c;
  c.rho0 = StepFunction::constant(0.4);
  c.eps = {0.2, 0.1, 0.05, 0.0};
  c.family = VelocityPerturbation::Scale;
  RateReport r = flux_stability(c);
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    CHECK(r.errors[i] == doctest::Approx(c.eps[i] * 0.6 * (c.T - c.t0)).epsilon(1e-12));
  }
  CHECK(r.bound_ok);
  CHECK(r.fitted);
  CHECK(r.fit.slope == doctest::Approx(1.0).epsilon(1e-9));

  c.rho0 = five_jumps();
  c.x0 = -1.25;
  c.eps = ladder(3, 7);
  for (auto kind : {VelocityPerturbation::Scale, VelocityPerturbation::Smooth}) {
    c.family = kind;
    RateReport s = flux_stability(c);
    CHECK(s.hypotheses_ok);
    CHECK(s.bound_ok);
  }
}

TEST_CASE("one-point ladder reports an unfitted rate") {
  FluxStabilityConfig c;
  c.rho0 = StepFunction::constant(0.4);
  c.eps = {0.1};
  RateReport r = flux_stability(c);
  CHECK_FALSE(r.fitted);
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("burgers transform agrees with the direct solve") {
  BurgersCheck flat = burgers_transform_check(StepFunction::constant(0.3), 2.0, 8);
  CHECK(flat.l1_discrepancy == 0.0);
  CHECK(flat.fronts == 0);
  BurgersCheck riemann = burgers_transform_check(StepFunction({0.0}, {0.2, 0.8}), 2.0, 8);
  CHECK(riemann.l1_discrepancy <= 1e-8);
  CHECK(riemann.max_front_offset <= 1e-8);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) {
    StepFunction rho = shockline::testing::random_step(rng, 6, 6, 0, 64);
    BurgersCheck b = burgers_transform_check(rho, 2.0, 6);
    CHECK(b.l1_discrepancy <= 1e-8);
    CHECK(b.max_front_offset <= 1e-8);
  }
}

TEST_CASE("traffic shocks are slower than the traffic") {
  std::mt19937_64 rng(11);
  VelocityFunction w = VelocityFunction::linear_traffic();
  for (int k = 0; k < 20; ++k) {
    StepFunction rho = shockline::testing::random_step(rng, 8, 8, 13, 256);
    FrontTrackingSolution sol =
        evolve(rho, tracking_flux(FluxFunction::traffic(w), 8), uniform(rng, 0.5, 2.0));
    CHECK(shock_speed_margin(sol, w) > 0.0);
  }
}

TEST_CASE("front-tracking trajectories converge in the level") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  ConvergenceReport r = trajectory_convergence(five_jumps(), f, VelocityFunction::linear_traffic(),
                                               {4, 6, 8, 10}, 12, -1.25, 0.25, 2.0);
  CHECK(r.monotone);
  CHECK(r.shock_margin > 0.0);
  CHECK(r.errors.back() < 1e-2);
}

TEST_CASE("errors shrink with eps up to one inversion per ladder") {
  InitialStabilityConfig c;
  c.rho0 = five_jumps();
  c.eps = ladder(3, 9);
  c.x0 = -1.25;
  c.anchor = -2.0;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    c.x0 = uniform(rng, -1.5, 0.5);
    for (auto kind : {InitialPerturbation::JumpShift, InitialPerturbation::HeightDither,
                      InitialPerturbation::AddedStep}) {
      c.family = kind;
      RateReport r = initial_field_stability(c);
      int inversions = 0;
      for (std::size_t i = 1; i < r.errors.size(); ++i) {
        if (r.errors[i] > r.errors[i - 1]) ++inversions;
      }
      CHECK(inversions <= 1);
    }
  }
}
