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

#ifndef SHOCKLINE_VISCOUS_HPP_
#define SHOCKLINE_VISCOUS_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "shockline/flux.hpp"
#include "shockline/step_function.hpp"
#include "shockline/trajectory.hpp"

namespace shockline {

struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t cells = 2000;
};

struct ViscousOptions {
  double cfl_safety = 0.9;
  /// Fixed time step; must satisfy the stability bound or ConfigError is thrown.
  std::optional<double> dt;
  /// Upper bound on stored time levels. Longer runs keep every k-th level.
  std::size_t max_stored_levels = 4096;
};

/// Cell averages of v_t + f(v)_x = eps v_xx on a uniform grid, with constant
/// far-field (Dirichlet) states in ghost cells on either side.
class GridField {
 public:
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t cells() const { return cells_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  double epsilon() const { return eps_; }
  double left_state() const { return left_; }
  double right_state() const { return right_; }
  double horizon() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& level(std::size_t k) const { return levels_.at(k); }
  std::size_t level_count() const { return levels_.size(); }
  double cell_center(std::size_t i) const { return x_min_ + (static_cast<double>(i) + 0.5) * dx_; }

  /// Bilinear interpolation in (x, t) between cell centres and stored levels.
  double value(double x, double t) const;
  /// Cell values at time t, linear in time between stored levels.
  std::vector<double> values_at(double t) const;

  /// Sum of v dx over the grid at stored level k.
  double mass(std::size_t k) const;
  /// Time integral of (right boundary flux - left boundary flux) up to level k.
  double boundary_outflow(std::size_t k) const { return outflow_.at(k); }

 private:
  friend GridField solve_viscous(const StepFunction&, const FluxFunction&, double,
                                 const GridSpec&, double, const ViscousOptions&);
  double x_min_ = 0.0;
  double x_max_ = 0.0;
  std::size_t cells_ = 0;
  double dx_ = 0.0;
  double dt_ = 0.0;
  double eps_ = 0.0;
  double left_ = 0.0;
  double right_ = 0.0;
  std::vector<double> times_;
  std::vector<std::vector<double>> levels_;
  std::vector<double> outflow_;
};

/// Engquist-Osher numerical flux.
double engquist_osher(const FluxFunction& f, double u, double v);

/// Largest stable explicit step: dt (L/dx + 2 eps/dx^2) <= safety keeps the
/// scheme monotone, and dt <= safety min(dx/(2L), dx^2/(2 eps)).
double stable_time_step(const FluxFunction& f, double eps, double dx, double safety = 0.9);

/// Grid covering the initial support widened by (|w|_inf + |f|_Lip) T + 4 sqrt(eps T).
GridSpec default_grid(const StepFunction& initial, const FluxFunction& f,
                      const VelocityFunction& w, double eps, double T, std::size_t cells);

GridField solve_viscous(const StepFunction& initial, const FluxFunction& f, double eps,
                        const GridSpec& grid, double T, const ViscousOptions& options = {});

/// Classical RK4 for dz/dt = w(v(z, t)) using the stored level spacing as step.
Trajectory track_smooth(const GridField& field, const VelocityFunction& w, double x0, double t0,
                        double T);

}  // namespace shockline

#endif  // SHOCKLINE_VISCOUS_HPP_
