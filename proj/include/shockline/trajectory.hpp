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

#ifndef SHOCKLINE_TRAJECTORY_HPP_
#define SHOCKLINE_TRAJECTORY_HPP_

#include <cstddef>
#include <vector>

#include "shockline/flux.hpp"
#include "shockline/front_tracking.hpp"

namespace shockline {

/// Continuous piecewise-linear particle path. Segment k runs from times[k] to
/// times[k + 1] with speeds[k]; stuck_front[k] names the front the particle
/// rides on that segment, or kNoFront.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> speeds;
  std::vector<std::size_t> stuck_front;

  double start_time() const { return times.front(); }
  double end_time() const { return times.back(); }
  std::size_t segment_count() const { return speeds.size(); }

  /// Position at t in [start_time, end_time]; RangeError outside.
  double at(double t) const;
  /// Speed on the segment containing t (right-continuous at nodes).
  double speed_at(double t) const;
  bool has_sticking() const;
  std::vector<double> sample(const std::vector<double>& ts) const;
};

/// Filippov trajectory dz/dt in w(v(z, t)) from (x0, t0) to T through an exact
/// front-tracking field.
Trajectory track(const FrontTrackingSolution& sol, const VelocityFunction& w, double x0,
                 double t0, double T);

/// max_t |a(t) - b(t)| over the common time interval (exact for piecewise-linear paths).
double sup_distance(const Trajectory& a, const Trajectory& b);

/// Hitting time, measured from t0, of a particle at z0 with the shock (rho_l, rho_r)
/// located at a at time t0, under flux rho w(rho).
double shock_hitting_time(const VelocityFunction& w, double rho_l, double rho_r, double a,
                          double z0);

struct RiemannComparison {
  VelocityFunction w;
  VelocityFunction w_bar;
  double rho_l = 0.0;
  double rho_r = 0.0;
  double rho_bar_l = 0.0;
  double rho_bar_r = 0.0;
  /// Shock positions and particle starts at time t0.
  double a = 0.0;
  double a_bar = 0.0;
  double z0 = 0.0;
  double z_bar0 = 0.0;
  double t0 = 0.0;
};

/// Closed-form z_bar(t) - z(t) for two particles that each cross one traffic
/// shock; t must lie past both hitting times.
double riemann_comparison(const RiemannComparison& c, double t);

struct SpreadTable {
  std::vector<double> times;
  std::vector<double> spread;
};

/// |x(t) - y(t)| on the union of both trajectories' nodes.
SpreadTable initial_position_spread(const FrontTrackingSolution& sol, const VelocityFunction& w,
                                    double x0, double y0, double t0, double T);

/// Smallest C >= 0 with spread^2 <= spread(t0)^2 (t / t0)^C at every tabulated time.
double fit_spread_exponent(const SpreadTable& table);

struct InclusionReport {
  std::size_t samples = 0;
  double max_violation = 0.0;
  bool ok = true;
};

/// Samples interior times uniformly and checks that the path speed lies in
/// [min, max] of w at the one-sided field limits, up to tol.
InclusionReport check_filippov_inclusion(const Trajectory& z, const FrontTrackingSolution& sol,
                                         const VelocityFunction& w, std::size_t samples = 1000,
                                         double tol = 1e-10);

}  // namespace shockline

#endif  // SHOCKLINE_TRAJECTORY_HPP_
