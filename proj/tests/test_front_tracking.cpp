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
#include <random>

#include "generators.hpp"
#include "shockline/error.hpp"
#include "shockline/front_tracking.hpp"

using namespace shockline;
using shockline::testing::random_step;

namespace {

PiecewiseLinearFlux traffic(int level) {
  return piecewise_linearize(FluxFunction::traffic_quadratic(), level);
}

// Checks the structural invariants of a solution at a time strictly between events.
void check_ordered(const FrontTrackingSolution& sol, double t) {
  std::vector<std::size_t> ids = sol.alive_fronts(t);
  double left = sol.left_far();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Front& fr = sol.front(ids[i]);
    CHECK(fr.left_value == left);
    left = fr.right_value;
    if (i > 0) CHECK(fr.position(t) > sol.front(ids[i - 1]).position(t));
  }
  CHECK(left == sol.right_far());
}

}  // namespace

TEST_CASE("riemann problem: stationary traffic shock") {
  std::vector<Front> fan = solve_riemann(traffic(10), 0.2, 0.8, 0.0, 0.0);
  REQUIRE(fan.size() == 1);
  CHECK(std::abs(fan[0].speed) <= 1e-12);
  CHECK(fan[0].left_value == 0.2);
  CHECK(fan[0].right_value == 0.8);
}

TEST_CASE("riemann problem: coarse rarefaction") {
  std::vector<Front> fan = solve_riemann(traffic(1), 1.0, 0.0, 0.0, 0.0);
  REQUIRE(fan.size() == 2);
  CHECK(fan[0].speed == -0.5);
  CHECK(fan[1].speed == 0.5);
  CHECK(fan[0].left_value == 1.0);
  CHECK(fan[0].right_value == 0.5);
  CHECK(fan[1].right_value == 0.0);
  CHECK_THROWS_AS(solve_riemann(traffic(1), 0.3, 0.3, 0.0, 0.0), PreconditionError);
}

TEST_CASE("riemann fans satisfy Rankine-Hugoniot and admissibility") {
  std::mt19937_64 rng(5);
  for (int level : {3, 6, 9}) {
    PiecewiseLinearFlux f = traffic(level);
    for (int trial = 0; trial < 100; ++trial) {
      double vl = shockline::testing::dyadic(rng, level, 0, 1 << level);
      double vr = shockline::testing::dyadic(rng, level, 0, 1 << level);
      if (vl == vr) continue;
      std::vector<Front> fan = solve_riemann(f, vl, vr, 0.3, 0.1);
      CHECK(fan.front().left_value == vl);
      CHECK(fan.back().right_value == vr);
      for (std::size_t i = 0; i < fan.size(); ++i) {
        const Front& fr = fan[i];
        double rh = (f(fr.left_value) - f(fr.right_value)) / (fr.left_value - fr.right_value);
        CHECK(std::abs(fr.speed - rh) <= 1e-12);
        if (i > 0) {
          CHECK(fr.speed > fan[i - 1].speed);
          CHECK(fr.left_value == fan[i - 1].right_value);
        }
        double lo = std::min(fr.left_value, fr.right_value);
        double hi = std::max(fr.left_value, fr.right_value);
        PiecewiseLinearFlux env =
            fr.left_value < fr.right_value ? convex_envelope(f, lo, hi) : concave_envelope(f, lo, hi);
        CHECK(env.segment_count() == 1);
      }
    }
  }
}

TEST_CASE("riemann fans on a non-convex flux") {
  // Flux with an inflection: convex then concave.
  PiecewiseLinearFlux f({0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 0.05, 0.3, 0.55, 0.6});
  std::vector<Front> up = solve_riemann(f, 0.0, 1.0, 0.0, 0.0);
  // Lower hull of the S-shaped graph: (0,0) -> (0.25,0.05) -> (1,0.6).
  REQUIRE(up.size() == 2);
  CHECK(up[0].right_value == 0.25);
  CHECK(up[0].speed == doctest::Approx(0.2));
  CHECK(up[1].speed == doctest::Approx(0.55 / 0.75));
  std::vector<Front> down = solve_riemann(f, 1.0, 0.0, 0.0, 0.0);
  // Upper hull: (0,0) -> (0.75,0.55) -> (1,0.6), traversed from 1 down to 0.
  REQUIRE(down.size() == 2);
  CHECK(down[0].right_value == 0.75);
  CHECK(down[0].speed == doctest::Approx(0.2));
  CHECK(down[1].speed == doctest::Approx(0.55 / 0.75));
}

TEST_CASE("evolve: single jump is the riemann fan") {
  PiecewiseLinearFlux f = traffic(4);
  StepFunction init({0.0}, {0.75, 0.25});
  FrontTrackingSolution sol = evolve(init, f, 3.0);
  CHECK(sol.collision_count() == 0);
  CHECK(sol.fronts().size() == solve_riemann(f, 0.75, 0.25, 0.0, 0.0).size());
  REQUIRE(sol.events().size() == 1);
  CHECK(sol.events()[0].incoming.empty());
  // Slice at t > 0 has one interior value per envelope vertex crossed.
  StepFunction s = slice(sol, 1.0);
  CHECK(s.values() == std::vector<double>{0.75, 0.6875, 0.625, 0.5625, 0.5, 0.4375, 0.375,
                                          0.3125, 0.25});
  CHECK(s.breakpoints().front() == doctest::Approx(-0.4375));
}

TEST_CASE("evolve: two approaching shocks merge once") {
  PiecewiseLinearFlux f = traffic(4);
  StepFunction init({0.0, 1.0}, {0.25, 0.5, 0.75});
  FrontTrackingSolution sol = evolve(init, f, 4.0);
  // Speeds 1 - (0.25 + 0.5) = 0.25 and 1 - (0.5 + 0.75) = -0.25.
  REQUIRE(sol.collision_count() == 1);
  const Event& e = sol.events().back();
  CHECK(e.time == doctest::Approx(1.0 / 0.5));
  CHECK(e.position == doctest::Approx(0.5));
  REQUIRE(e.outgoing.size() == 1);
  const Front& merged = sol.front(e.outgoing[0]);
  CHECK(merged.left_value == 0.25);
  CHECK(merged.right_value == 0.75);
  double rh = (f(0.25) - f(0.75)) / (0.25 - 0.75);
  CHECK(std::abs(merged.speed - rh) <= 1e-12);
  CHECK(slice(sol, 3.0).jump_count() < slice(sol, 1.0).jump_count());
}

TEST_CASE("evolve: constant data") {
  FrontTrackingSolution sol = evolve(StepFunction::constant(0.4), traffic(3), 1.0);
  CHECK(sol.fronts().empty());
  CHECK(sol.events().empty());
  CHECK(evaluate_field(sol, 0.7, 0.5) == std::pair<double, double>{0.4, 0.4});
  CHECK(slice(sol, 1.0).values() == std::vector<double>{0.4});
}

TEST_CASE("evolve: argument checks") {
  CHECK_THROWS_AS(evolve(StepFunction::constant(0.4), traffic(3), 0.0), PreconditionError);
  CHECK_THROWS_AS(evolve(StepFunction({0.0}, {0.4, 1.5}), traffic(3), 1.0), RangeError);
  EvolveOptions tight;
  tight.max_events = 2;
  std::mt19937_64 rng(9);
  StepFunction busy = random_step(rng, 10, 6, 0, 64);
  while (evolve(busy, traffic(6), 4.0).collision_count() <= 2) busy = random_step(rng, 10, 6, 0, 64);
  CHECK_THROWS_AS(evolve(busy, traffic(6), 4.0, tight), SolverError);
}

TEST_CASE("field evaluation") {
  FrontTrackingSolution sol = evolve(StepFunction({0.0}, {0.2, 0.8}), traffic(10), 2.0);
  auto [l, r] = evaluate_field(sol, 0.0, 1.0);
  CHECK(l == 0.2);
  CHECK(r == 0.8);
  CHECK(evaluate_field(sol, -5.0, 1.0) == std::pair<double, double>{0.2, 0.2});
  CHECK(evaluate_field(sol, 5.0, 1.0) == std::pair<double, double>{0.8, 0.8});
  CHECK_THROWS_AS(evaluate_field(sol, 0.0, 2.5), RangeError);
  CHECK_THROWS_AS(slice(sol, -0.1), RangeError);

  StepFunction init({-0.5, 0.5}, {0.1, 0.6, 0.3});
  FrontTrackingSolution two = evolve(init, traffic(5), 1.0);
  StepFunction s0 = slice(two, 0.0);
  CHECK(s0.breakpoints() == init.breakpoints());
  CHECK(s0.values() == init.values());
}

TEST_CASE("shock catalog") {
  FrontTrackingSolution sol = evolve(StepFunction({0.0}, {0.2, 0.8}), traffic(10), 2.0);
  auto all = shock_catalog(sol, 0.0);
  CHECK(all.size() == sol.fronts().size());
  auto big = shock_catalog(sol, 0.5);
  REQUIRE(big.size() == 1);
  CHECK(big[0].strength == doctest::Approx(0.6));
  CHECK(big[0].t_end == 2.0);
  CHECK(shock_catalog(sol, 0.61).empty());
  CHECK(distance_to_shocks(big, 0.3, 1.0) == doctest::Approx(0.3));
  CHECK(distance_to_shocks(big, 0.0, 2.5) == doctest::Approx(0.5));
  CHECK(in_shock_neighborhood(big, 0.01, 1.0, 0.02));
  CHECK_FALSE(in_shock_neighborhood(big, 0.03, 1.0, 0.02));
  CHECK(std::isinf(distance_to_shocks({}, 0.0, 0.0)));

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    StepFunction init = random_step(rng, 8, 5, 2, 32);
    FrontTrackingSolution s = evolve(init, traffic(5), 1.0);
    CHECK(shock_catalog(s, init.total_variation()).empty());
  }
}

TEST_CASE("random runs: conservation, TVD, maximum principle, ordering") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    StepFunction init = random_step(rng, 10, 8, 0, 256);
    std::vector<double> vs = init.values();
    vs.back() = vs.front();
    init = StepFunction(init.breakpoints(), vs);
    FrontTrackingSolution sol = evolve(init, traffic(8), 2.0);
    const double c = init.left_far();
    const double mass0 = init.integral(-6.0, 6.0) - 12.0 * c;
    double tv_prev = init.total_variation();
    for (double t = 0.05; t <= 2.0; t += 0.1) {
      StepFunction s = slice(sol, t);
      CHECK(std::abs(s.integral(-6.0, 6.0) - 12.0 * c - mass0) <= 1e-10);
      CHECK(s.total_variation() <= tv_prev + 1e-14);
      tv_prev = s.total_variation();
      CHECK(s.min_value() >= init.min_value());
      CHECK(s.max_value() <= init.max_value());
      check_ordered(sol, t);
    }
    for (const Event& e : sol.events()) {
      if (!e.incoming.empty()) CHECK(e.incoming.size() >= 2);
      for (std::size_t i = 1; i < e.outgoing.size(); ++i) {
        CHECK(sol.front(e.outgoing[i]).speed > sol.front(e.outgoing[i - 1]).speed);
      }
    }
  }
}

TEST_CASE("random runs: L1 contraction") {
  std::mt19937_64 rng(77);
  PiecewiseLinearFlux f = traffic(7);
  for (int trial = 0; trial < 20; ++trial) {
    StepFunction a = random_step(rng, 8, 7, 0, 128);
    StepFunction b = random_step(rng, 8, 7, 0, 128);
    FrontTrackingSolution sa = evolve(a, f, 2.0);
    FrontTrackingSolution sb = evolve(b, f, 2.0);
    // Far-field states may differ; compare on a window wide enough for the
    // transported difference and subtract the far-field contributions.
    double d0 = l1_distance(a, b, -8.0, 8.0);
    for (double t : {0.5, 1.0, 2.0}) {
      double dt = l1_distance(slice(sa, t), slice(sb, t), -8.0, 8.0);
      double far = (std::abs(a.left_far() - b.left_far()) + std::abs(a.right_far() - b.right_far())) * t;
      CHECK(dt <= d0 + far + 1e-10);
    }
  }
}

TEST_CASE("traffic shocks travel slower than the flow") {
  std::mt19937_64 rng(31);
  VelocityFunction w = VelocityFunction::linear_traffic();
  for (int trial = 0; trial < 30; ++trial) {
    StepFunction init = random_step(rng, 10, 8, 13, 256);
    FrontTrackingSolution sol = evolve(init, traffic(8), 2.0);
    for (const Front& fr : sol.fronts()) {
      CHECK(fr.speed < std::min(w(fr.left_value), w(fr.right_value)));
    }
  }
}

TEST_CASE("burgers flux on a symmetric domain") {
  PiecewiseLinearFlux f = piecewise_linearize(FluxFunction::burgers(), 6);
  StepFunction init({0.0, 1.0}, {-0.5, 0.75, -0.25});
  FrontTrackingSolution sol = evolve(init, f, 2.0);
  for (const Front& fr : sol.fronts()) {
    double rh = (f(fr.left_value) - f(fr.right_value)) / (fr.left_value - fr.right_value);
    CHECK(std::abs(fr.speed - rh) <= 1e-12);
  }
  double m0 = init.integral(-4.0, 4.0);
  // Waves stay inside the window; mass changes by the far-field flux difference.
  double farflux = (f(-0.5) - f(-0.25)) * 2.0;
  CHECK(slice(sol, 2.0).integral(-4.0, 4.0) == doctest::Approx(m0 + farflux).epsilon(1e-12));
}

TEST_CASE("semigroup property") {
  std::mt19937_64 rng(4);
  PiecewiseLinearFlux f = traffic(6);
  for (int trial = 0; trial < 10; ++trial) {
    StepFunction init = random_step(rng, 6, 6, 0, 64);
    FrontTrackingSolution direct = evolve(init, f, 2.0);
    FrontTrackingSolution first = evolve(init, f, 0.8);
    FrontTrackingSolution second = evolve(slice(first, 0.8), f, 1.2);
    double d = l1_distance(slice(direct, 2.0), slice(second, 1.2), -6.0, 6.0);
    CHECK(d <= 1e-10);
  }
}
