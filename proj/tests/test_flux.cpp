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
#include "shockline/flux.hpp"

using namespace shockline;
using shockline::testing::random_pl;

namespace {

// Lower convex hull of a point set, evaluated at x by minimising over all
// chords that straddle x.
double brute_lower_hull(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  double best = INFINITY;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i; j < xs.size(); ++j) {
      if (xs[i] > x || xs[j] < x) continue;
      double v = xs[i] == xs[j] ? ys[i] : ys[i] + (ys[j] - ys[i]) * (x - xs[i]) / (xs[j] - xs[i]);
      best = std::min(best, v);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("traffic quadratic evaluation") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  CHECK(f(0.5) == 0.25);
  CHECK(f(0.0) == 0.0);
  CHECK(f(1.0) == 0.0);
  CHECK_THROWS_AS(f(1.5), RangeError);
  CHECK_THROWS_AS(f(-0.1), RangeError);
  CHECK(f.lipschitz_norm() == doctest::Approx(1.0));
}

TEST_CASE("piecewise-linear evaluation interpolates") {
  PiecewiseLinearFlux f({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  CHECK(f(0.25) == 0.5);
  CHECK(f(0.5) == 1.0);
  CHECK(f(1.0) == 0.0);
  CHECK(f.lipschitz_norm() == 2.0);
  CHECK(f.derivative(0.5, Side::Left) == 2.0);
  CHECK(f.derivative(0.5, Side::Right) == -2.0);
  CHECK_THROWS_AS(f(1.1), RangeError);
  CHECK_THROWS_AS(PiecewiseLinearFlux({0.0, 0.0}, {1.0, 2.0}), PreconditionError);
  CHECK_THROWS_AS(PiecewiseLinearFlux({0.0}, {1.0}), PreconditionError);
}

TEST_CASE("linearization of the traffic flux") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  PiecewiseLinearFlux f1 = piecewise_linearize(f, 1);
  CHECK(f1.breakpoints() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(f1.values() == std::vector<double>{0.0, 0.25, 0.0});
  for (int n = 1; n <= 12; ++n) {
    PiecewiseLinearFlux fn = piecewise_linearize(f, n);
    CHECK(fn.breakpoints().size() == (std::size_t{1} << n) + 1);
    CHECK(fn.lipschitz_norm() <= f.lipschitz_norm());
    // f' - (f^N)' peaks at the segment ends with value 2^-N.
    CHECK(lipschitz_distance(f, FluxFunction::piecewise_linear(fn)) ==
          doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(piecewise_linearize(f, 0), PreconditionError);
}

TEST_CASE("linearization error shrinks with level") {
  FluxFunction f = FluxFunction::traffic_quadratic();
  double previous = INFINITY;
  for (int n = 2; n <= 10; ++n) {
    PiecewiseLinearFlux coarse = piecewise_linearize(f, n - 1);
    double worst = 0.0;
    for (int j = 0; j <= (1 << n); ++j) {
      double x = std::ldexp(j, -n);
      worst = std::max(worst, std::abs(f(x) - coarse(x)));
    }
    CHECK(worst < previous);
    previous = worst;
  }
}

TEST_CASE("linear flux is a fixed point of linearization") {
  PiecewiseLinearFlux line({0.0, 1.0}, {0.0, 0.7});
  FluxFunction f = FluxFunction::piecewise_linear(line);
  for (int n : {1, 3, 6}) {
    PiecewiseLinearFlux fn = piecewise_linearize(f, n);
    for (double x : fn.breakpoints()) CHECK(fn(x) == doctest::Approx(0.7 * x).epsilon(1e-15));
  }
}

TEST_CASE("envelope examples") {
  PiecewiseLinearFlux hat({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  PiecewiseLinearFlux lower = convex_envelope(hat, 0.0, 1.0);
  CHECK(lower.breakpoints() == std::vector<double>{0.0, 1.0});
  CHECK(lower.values() == std::vector<double>{0.0, 0.0});

  PiecewiseLinearFlux traffic = piecewise_linearize(FluxFunction::traffic_quadratic(), 5);
  PiecewiseLinearFlux upper = concave_envelope(traffic, 0.0, 1.0);
  CHECK(upper.breakpoints() == traffic.breakpoints());
  CHECK(upper.values() == traffic.values());

  PiecewiseLinearFlux sub = concave_envelope(traffic, 0.1, 0.7);
  CHECK(sub.lower() == 0.1);
  CHECK(sub.upper() == 0.7);
  CHECK(sub(0.1) == traffic(0.1));
  CHECK(sub(0.7) == traffic(0.7));

  PiecewiseLinearFlux bowl = piecewise_linearize(FluxFunction::burgers(1.0, 0.0, 1.0), 4);
  PiecewiseLinearFlux same = convex_envelope(bowl, 0.25, 0.75);
  for (double x : same.breakpoints()) CHECK(same(x) == bowl(x));
  CHECK(same.segment_count() == 8);

  CHECK_THROWS_AS(convex_envelope(hat, 0.3, 0.3), PreconditionError);
  CHECK_THROWS_AS(convex_envelope(hat, 0.3, 1.3), RangeError);
}

TEST_CASE("envelope properties on random fluxes") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    PiecewiseLinearFlux f = random_pl(rng, shockline::testing::uniform_int(rng, 1, 12));
    double a = shockline::testing::uniform(rng, 0.0, 0.5);
    double b = shockline::testing::uniform(rng, 0.5, 1.0);
    PiecewiseLinearFlux lo = convex_envelope(f, a, b);
    PiecewiseLinearFlux hi = concave_envelope(f, a, b);
    CHECK(lo(a) == f(a));
    CHECK(lo(b) == f(b));
    CHECK(hi(a) == f(a));
    CHECK(hi(b) == f(b));
    for (std::size_t i = 1; i < lo.segment_count(); ++i) CHECK(lo.slopes()[i] > lo.slopes()[i - 1]);
    for (std::size_t i = 1; i < hi.segment_count(); ++i) CHECK(hi.slopes()[i] < hi.slopes()[i - 1]);

    std::vector<double> px{a};
    std::vector<double> py{f(a)};
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
      double x = f.breakpoints()[i];
      if (x > a && x < b) {
        px.push_back(x);
        py.push_back(f.values()[i]);
      }
    }
    px.push_back(b);
    py.push_back(f(b));
    for (double x : px) {
      CHECK(lo(x) <= f(x) + 1e-12);
      CHECK(hi(x) >= f(x) - 1e-12);
      CHECK(lo(x) == doctest::Approx(brute_lower_hull(px, py, x)).epsilon(1e-10));
    }

    PiecewiseLinearFlux lo2 = convex_envelope(lo, a, b);
    PiecewiseLinearFlux hi2 = concave_envelope(hi, a, b);
    CHECK(lo2.breakpoints() == lo.breakpoints());
    CHECK(hi2.breakpoints() == hi.breakpoints());
  }
}

TEST_CASE("lipschitz distance matches all-pairs difference quotients") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    PiecewiseLinearFlux f = random_pl(rng, shockline::testing::uniform_int(rng, 1, 8));
    PiecewiseLinearFlux g = random_pl(rng, shockline::testing::uniform_int(rng, 1, 8));
    std::vector<double> xs = f.breakpoints();
    xs.insert(xs.end(), g.breakpoints().begin(), g.breakpoints().end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double brute = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        double q = ((f(xs[j]) - g(xs[j])) - (f(xs[i]) - g(xs[i]))) / (xs[j] - xs[i]);
        brute = std::max(brute, std::abs(q));
      }
    }
    CHECK(lipschitz_distance(f, g) == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("velocity functions") {
  VelocityFunction w = VelocityFunction::linear_traffic();
  CHECK(w(0.25) == 0.75);
  CHECK(w.in_admissible_class());
  CHECK(w.lipschitz_norm() == 1.0);
  CHECK(w.sup_norm() == 1.0);

  VelocityFunction t = VelocityFunction::table({0.0, 0.5, 1.0}, {1.0, 0.25, 0.0});
  CHECK(t(0.25) == 0.625);
  CHECK(t.in_admissible_class());
  CHECK(t.lipschitz_norm() == 1.5);
  CHECK(t.derivative(0.5, Side::Left) == -1.5);
  CHECK(t.derivative(0.5, Side::Right) == -0.5);

  CHECK_FALSE(VelocityFunction::table({0.0, 1.0}, {1.0, 0.1}).in_admissible_class());
  CHECK_FALSE(VelocityFunction::table({0.0, 0.5, 1.0}, {1.0, 1.0, 0.0}).in_admissible_class());
  CHECK_FALSE(VelocityFunction::linear_traffic(1.0, 2.0).in_admissible_class());

  double eps = 0.125;
  VelocityFunction scaled = VelocityFunction::linear_traffic(1.0 + eps);
  CHECK(lipschitz_distance(w, scaled) == doctest::Approx(eps).epsilon(1e-14));
  VelocityFunction tabled = VelocityFunction::table({0.0, 1.0}, {1.0, 0.0});
  CHECK(lipschitz_distance(w, tabled) == 0.0);
}

TEST_CASE("flux from a velocity function") {
  FluxFunction direct = FluxFunction::traffic_quadratic();
  FluxFunction viaw = FluxFunction::traffic(VelocityFunction::linear_traffic());
  for (double r : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    CHECK(viaw(r) == doctest::Approx(direct(r)).epsilon(1e-15));
    CHECK(viaw.derivative(r, Side::Right) ==
          doctest::Approx(direct.derivative(r, Side::Right)).epsilon(1e-15));
  }
  CHECK(lipschitz_distance(direct, viaw) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(viaw.turning_points() == std::vector<double>{0.5});

  VelocityFunction t = VelocityFunction::table({0.0, 0.5, 1.0}, {1.0, 0.25, 0.0});
  FluxFunction ft = FluxFunction::traffic(t);
  CHECK(ft.kinks() == std::vector<double>{0.5});
  // d/drho on [0, 0.5] is 1 - 3 rho: vanishes at 1/3.
  REQUIRE(ft.turning_points().size() == 1);
  CHECK(ft.turning_points()[0] == doctest::Approx(1.0 / 3.0));
  // Largest |f'|: one-sided slopes at 0, 0.5 and 1 are 1, -0.5 | 0, -0.5.
  CHECK(ft.lipschitz_norm() == doctest::Approx(1.0));
}

TEST_CASE("variation integrates |f'|") {
  std::vector<FluxFunction> fluxes{
      FluxFunction::traffic_quadratic(), FluxFunction::burgers(),
      FluxFunction::traffic(VelocityFunction::table({0.0, 0.3, 0.6, 1.0}, {1.0, 0.9, 0.2, 0.0})),
      FluxFunction::piecewise_linear(PiecewiseLinearFlux({0.0, 0.4, 1.0}, {0.0, 1.0, -0.5}))};
  std::mt19937_64 rng(3);
  for (const FluxFunction& f : fluxes) {
    for (int trial = 0; trial < 20; ++trial) {
      double a = shockline::testing::uniform(rng, f.lower(), f.upper());
      double b = shockline::testing::uniform(rng, f.lower(), f.upper());
      const int n = 200000;
      double quad = 0.0;
      double lo = std::min(a, b);
      double h = std::abs(b - a) / n;
      for (int i = 0; i < n; ++i) {
        quad += std::abs(f.derivative(lo + (i + 0.5) * h, Side::Right)) * h;
      }
      CHECK(f.variation(a, b) == doctest::Approx(quad).epsilon(1e-5));
    }
  }
}
