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

#ifndef SHOCKLINE_FRONT_TRACKING_HPP_
#define SHOCKLINE_FRONT_TRACKING_HPP_

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "shockline/flux.hpp"
#include "shockline/step_function.hpp"

namespace shockline {

inline constexpr std::size_t kNoFront = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kNoEvent = std::numeric_limits<std::size_t>::max();

struct Front {
  std::size_t id = kNoFront;
  double birth_time = 0.0;
  double birth_position = 0.0;
  double speed = 0.0;
  double left_value = 0.0;
  double right_value = 0.0;
  double death_time = std::numeric_limits<double>::infinity();
  std::size_t birth_event = kNoEvent;
  std::size_t death_event = kNoEvent;

  double position(double t) const { return birth_position + speed * (t - birth_time); }
  bool alive_at(double t) const { return birth_time <= t && t < death_time; }
  double strength() const;
};

/// Interaction point. Riemann fans of the initial data are recorded as events
/// at t = 0 with no incoming fronts.
struct Event {
  double time = 0.0;
  double position = 0.0;
  std::vector<std::size_t> incoming;
  std::vector<std::size_t> outgoing;
  double left_state = 0.0;
  double right_state = 0.0;
  /// Fronts bordering the event point immediately after it was processed.
  std::size_t left_neighbor = kNoFront;
  std::size_t right_neighbor = kNoFront;
};

struct EvolveOptions {
  std::size_t max_events = 10'000'000;
  /// Fronts closer than this at a collision time join one multi-front collision.
  double merge_tolerance = 1e-12;
  /// Outgoing Riemann problems with |v_l - v_r| at or below this are dropped.
  double zero_strength = 1e-14;
};

/// Fronts emitted by the Riemann problem (v_l, v_r) at (x0, t0), ordered left
/// to right with strictly increasing speeds. Ids and event links are unset.
std::vector<Front> solve_riemann(const PiecewiseLinearFlux& f, double v_l, double v_r, double x0,
                                 double t0);

class FrontTrackingSolution {
 public:
  const std::vector<Front>& fronts() const { return fronts_; }
  const std::vector<Event>& events() const { return events_; }
  const Front& front(std::size_t id) const { return fronts_.at(id); }
  const StepFunction& initial() const { return initial_; }
  const PiecewiseLinearFlux& flux() const { return flux_; }
  double horizon() const { return horizon_; }
  double left_far() const { return initial_.left_far(); }
  double right_far() const { return initial_.right_far(); }

  /// Number of events with at least one incoming front.
  std::size_t collision_count() const;

  /// Ids of fronts alive at t, ordered by position and then speed.
  std::vector<std::size_t> alive_fronts(double t) const;

  /// Neighbouring live front of `id` at time t on the given side, as it stood
  /// after all events at times <= t were processed.
  std::size_t neighbor(std::size_t id, double t, Side side) const;

 private:
  friend FrontTrackingSolution evolve(const StepFunction&, const PiecewiseLinearFlux&, double,
                                      const EvolveOptions&);

  std::vector<Front> fronts_;
  std::vector<Event> events_;
  StepFunction initial_;
  PiecewiseLinearFlux flux_{{0.0, 1.0}, {0.0, 0.0}};
  double horizon_ = 0.0;
  std::vector<std::vector<std::pair<double, std::size_t>>> left_history_;
  std::vector<std::vector<std::pair<double, std::size_t>>> right_history_;
};

/// Exact front-tracking solution of v_t + f(v)_x = 0 on [0, T].
FrontTrackingSolution evolve(const StepFunction& initial, const PiecewiseLinearFlux& f, double T,
                             const EvolveOptions& options = {});

/// (v(x-, t), v(x+, t)); fronts within 1e-12 of x count as located at x.
std::pair<double, double> evaluate_field(const FrontTrackingSolution& sol, double x, double t);

/// v(., t) as a step function.
StepFunction slice(const FrontTrackingSolution& sol, double t);

struct ShockRecord {
  std::size_t front_id = kNoFront;
  double t_begin = 0.0;
  double t_end = 0.0;
  double x_begin = 0.0;
  double x_end = 0.0;
  double strength = 0.0;
  double speed = 0.0;
};

/// All fronts with strength strictly above eps, clipped to [0, T].
std::vector<ShockRecord> shock_catalog(const FrontTrackingSolution& sol, double eps);

/// Euclidean space-time distance from (x, t) to the nearest catalogued shock
/// segment; +inf for an empty catalog.
double distance_to_shocks(const std::vector<ShockRecord>& shocks, double x, double t);

inline bool in_shock_neighborhood(const std::vector<ShockRecord>& shocks, double x, double t,
                                  double delta) {
  return distance_to_shocks(shocks, x, t) < delta;
}

}  // namespace shockline

#endif  // SHOCKLINE_FRONT_TRACKING_HPP_
