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

#include "shockline/viscous.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shockline/error.hpp"

namespace shockline {

double engquist_osher(const FluxFunction& f, double u, double v) {
  double var = f.variation(u, v);
  return 0.5 * (f(u) + f(v)) - 0.5 * (v >= u ? var : -var);
}

double stable_time_step(const FluxFunction& f, double eps, double dx, double safety) {
  double L = f.lipschitz_norm();
  double bound = 1.0 / (L / dx + 2.0 * eps / (dx * dx));
  if (L > 0.0) bound = std::min(bound, dx / (2.0 * L));
  if (eps > 0.0) bound = std::min(bound, dx * dx / (2.0 * eps));
  return safety * bound;
}

GridSpec default_grid(const StepFunction& initial, const FluxFunction& f,
                      const VelocityFunction& w, double eps, double T, std::size_t cells) {
  double lo = initial.breakpoints().empty() ? 0.0 : initial.breakpoints().front();
  double hi = initial.breakpoints().empty() ? 0.0 : initial.breakpoints().back();
  double margin = (w.sup_norm() + f.lipschitz_norm()) * T + 4.0 * std::sqrt(eps * T);
  return GridSpec{lo - margin, hi + margin, cells};
}

GridField solve_viscous(const StepFunction& initial, const FluxFunction& f, double eps,
                        const GridSpec& grid, double T, const ViscousOptions& options) {
  if (!(eps > 0.0)) throw PreconditionError("solve_viscous: viscosity must be positive");
  if (!(T > 0.0)) throw PreconditionError("solve_viscous: horizon must be positive");
  if (grid.cells < 2 || !(grid.x_max > grid.x_min)) {
    throw ConfigError("solve_viscous: invalid grid");
  }
  if (!initial.breakpoints().empty() &&
      (initial.breakpoints().front() < grid.x_min || initial.breakpoints().back() > grid.x_max)) {
    throw ConfigError("solve_viscous: grid does not cover the initial support");
  }

  GridField field;
  field.x_min_ = grid.x_min;
  field.x_max_ = grid.x_max;
  field.cells_ = grid.cells;
  field.dx_ = (grid.x_max - grid.x_min) / static_cast<double>(grid.cells);
  field.eps_ = eps;
  field.left_ = initial.left_far();
  field.right_ = initial.right_far();
  const double dx = field.dx_;
  const std::size_t n = grid.cells;

  const double dt_max = stable_time_step(f, eps, dx, options.cfl_safety);
  std::size_t steps = 0;
  double dt = 0.0;
  if (options.dt) {
    dt = *options.dt;
    if (!(dt > 0.0) || dt > stable_time_step(f, eps, dx, options.cfl_safety) * (1.0 + 1e-12)) {
      throw ConfigError("solve_viscous: time step " + std::to_string(dt) +
                        " violates the stability bound " + std::to_string(dt_max));
    }
    steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    dt = T / static_cast<double>(steps);
  } else {
    steps = static_cast<std::size_t>(std::ceil(T / dt_max));
    dt = T / static_cast<double>(steps);
  }
  field.dt_ = dt;
  const std::size_t cap = std::max<std::size_t>(options.max_stored_levels, 2);
  const std::size_t stride = (steps + cap - 2) / (cap - 1);

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = grid.x_min + static_cast<double>(i) * dx;
    u[i] = initial.integral(a, a + dx) / dx;
  }
  field.times_.push_back(0.0);
  field.levels_.push_back(u);
  field.outflow_.push_back(0.0);

  std::vector<double> flux(n + 1);
  const double lambda = dt / dx;
  double outflow = 0.0;
  for (std::size_t step = 1; step <= steps; ++step) {
    for (std::size_t k = 0; k <= n; ++k) {
      double a = k == 0 ? field.left_ : u[k - 1];
      double b = k == n ? field.right_ : u[k];
      flux[k] = engquist_osher(f, a, b) - eps * (b - a) / dx;
    }
    for (std::size_t i = 0; i < n; ++i) u[i] -= lambda * (flux[i + 1] - flux[i]);
    outflow += dt * (flux[n] - flux[0]);
    if (step % stride == 0 || step == steps) {
      field.times_.push_back(step == steps ? T : static_cast<double>(step) * dt);
      field.levels_.push_back(u);
      field.outflow_.push_back(outflow);
    }
  }
  return field;
}

namespace {

double interpolate_cells(const GridField& g, const std::vector<double>& u, double x) {
  // Ghost centres sit half a cell outside the grid and carry the far-field states.
  double s = (x - g.x_min()) / g.dx() - 0.5;
  if (s <= -1.0) return g.left_state();
  const double n = static_cast<double>(g.cells());
  if (s >= n) return g.right_state();
  double i = std::floor(s);
  double frac = s - i;
  auto at = [&](double idx) {
    if (idx < 0.0) return g.left_state();
    if (idx >= n) return g.right_state();
    return u[static_cast<std::size_t>(idx)];
  };
  return (1.0 - frac) * at(i) + frac * at(i + 1.0);
}

std::size_t level_below(const GridField& g, double t) {
  const auto& ts = g.times();
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  return std::min(k, ts.size() - 2);
}

}  // namespace

double GridField::value(double x, double t) const {
  if (t < 0.0 || t > horizon() * (1.0 + 1e-12)) {
    throw RangeError("grid field: time " + std::to_string(t) + " outside [0, T]");
  }
  if (levels_.size() == 1) return interpolate_cells(*this, levels_[0], x);
  std::size_t k = level_below(*this, t);
  double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
  w = std::clamp(w, 0.0, 1.0);
  double a = interpolate_cells(*this, levels_[k], x);
  if (w == 0.0) return a;
  double b = interpolate_cells(*this, levels_[k + 1], x);
  return (1.0 - w) * a + w * b;
}

std::vector<double> GridField::values_at(double t) const {
  if (levels_.size() == 1) return levels_[0];
  std::size_t k = level_below(*this, t);
  double w = std::clamp((t - times_[k]) / (times_[k + 1] - times_[k]), 0.0, 1.0);
  std::vector<double> out(cells_);
  for (std::size_t i = 0; i < cells_; ++i) {
    out[i] = (1.0 - w) * levels_[k][i] + w * levels_[k + 1][i];
  }
  return out;
}

double GridField::mass(std::size_t k) const {
  double m = 0.0;
  for (double v : levels_.at(k)) m += v;
  return m * dx_;
}

Trajectory track_smooth(const GridField& field, const VelocityFunction& w, double x0, double t0,
                        double T) {
  if (!(x0 > field.x_min() && x0 < field.x_max())) {
    throw PreconditionError("track_smooth: start outside the grid interior");
  }
  if (!(t0 >= 0.0) || !(T >= t0) || T > field.horizon() * (1.0 + 1e-12)) {
    throw PreconditionError("track_smooth: need 0 <= t0 <= T <= field horizon");
  }
  T = std::min(T, field.horizon());
  Trajectory z;
  z.times.push_back(t0);
  z.positions.push_back(x0);
  if (T == t0) return z;

  double spacing = field.level_count() > 1 ? field.times()[1] - field.times()[0] : T - t0;
  auto steps = static_cast<std::size_t>(std::ceil((T - t0) / spacing - 1e-9));
  steps = std::max<std::size_t>(steps, 1);
  const double h = (T - t0) / static_cast<double>(steps);
  auto rhs = [&](double x, double t) {
    if (!(x >= field.x_min() && x <= field.x_max())) {
      throw SolverError("track_smooth: trajectory left the grid at t = " + std::to_string(t));
    }
    return w(field.value(x, std::min(t, T)));
  };

  double x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    double t = t0 + static_cast<double>(k) * h;
    double k1 = rhs(x, t);
    double k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h);
    double k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h);
    double k4 = rhs(x + h * k3, t + h);
    double speed = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    double t_next = k + 1 == steps ? T : t0 + static_cast<double>(k + 1) * h;
    x = x + speed * (t_next - t);
    rhs(x, t_next);
    z.speeds.push_back(speed);
    z.stuck_front.push_back(kNoFront);
    z.times.push_back(t_next);
    z.positions.push_back(x);
  }
  return z;
}

}  // namespace shockline
