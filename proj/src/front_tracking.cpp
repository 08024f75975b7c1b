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

#include "shockline/front_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "shockline/error.hpp"

namespace shockline {

namespace {

constexpr double kLocateTolerance = 1e-12;

struct Collision {
  double time;
  double position;
  std::size_t left;
  std::size_t right;
};

// Min-heap order: earliest time first, then leftmost position.
struct LaterCollision {
  bool operator()(const Collision& a, const Collision& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.position != b.position) return a.position > b.position;
    return a.left > b.left;
  }
};

}  // namespace

double Front::strength() const { return std::abs(left_value - right_value); }

std::vector<Front> solve_riemann(const PiecewiseLinearFlux& f, double v_l, double v_r, double x0,
                                 double t0) {
  if (v_l == v_r) {
    throw PreconditionError("solve_riemann: v_l == v_r, no jump to resolve");
  }
  std::vector<Front> fan;
  auto emit = [&](double left, double right, double speed) {
    Front fr;
    fr.birth_time = t0;
    fr.birth_position = x0;
    fr.left_value = left;
    fr.right_value = right;
    fr.speed = speed;
    fan.push_back(fr);
  };
  if (v_l < v_r) {
    PiecewiseLinearFlux env = convex_envelope(f, v_l, v_r);
    const auto& x = env.breakpoints();
    for (std::size_t k = 0; k + 1 < x.size(); ++k) emit(x[k], x[k + 1], env.slopes()[k]);
  } else {
    PiecewiseLinearFlux env = concave_envelope(f, v_r, v_l);
    const auto& x = env.breakpoints();
    for (std::size_t k = x.size() - 1; k > 0; --k) emit(x[k], x[k - 1], env.slopes()[k - 1]);
  }
  // Envelope vertices carry the interval endpoints exactly; pin them anyway.
  fan.front().left_value = v_l;
  fan.back().right_value = v_r;
  return fan;
}

std::size_t FrontTrackingSolution::collision_count() const {
  return static_cast<std::size_t>(std::count_if(
      events_.begin(), events_.end(), [](const Event& e) { return !e.incoming.empty(); }));
}

std::vector<std::size_t> FrontTrackingSolution::alive_fronts(double t) const {
  std::vector<std::size_t> ids;
  for (const Front& fr : fronts_) {
    if (fr.alive_at(t)) ids.push_back(fr.id);
  }
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    double pa = fronts_[a].position(t);
    double pb = fronts_[b].position(t);
    if (pa != pb) return pa < pb;
    return fronts_[a].speed < fronts_[b].speed;
  });
  return ids;
}

std::size_t FrontTrackingSolution::neighbor(std::size_t id, double t, Side side) const {
  const auto& hist = side == Side::Left ? left_history_.at(id) : right_history_.at(id);
  auto it = std::upper_bound(hist.begin(), hist.end(), t,
                             [](double value, const auto& entry) { return value < entry.first; });
  if (it == hist.begin()) return kNoFront;
  return std::prev(it)->second;
}

FrontTrackingSolution evolve(const StepFunction& initial, const PiecewiseLinearFlux& f, double T,
                             const EvolveOptions& options) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw PreconditionError("evolve: horizon must be positive and finite");
  }
  for (double c : initial.values()) {
    if (!(c >= f.lower() - 1e-12 && c <= f.upper() + 1e-12)) {
      throw RangeError("evolve: initial value " + std::to_string(c) +
                       " outside the flux domain");
    }
  }

  FrontTrackingSolution sol;
  sol.initial_ = initial;
  sol.flux_ = f;
  sol.horizon_ = T;
  auto& fronts = sol.fronts_;
  auto& events = sol.events_;
  std::vector<std::size_t> prev;
  std::vector<std::size_t> next;

  auto add_front = [&](Front fr, std::size_t event) {
    fr.id = fronts.size();
    fr.birth_event = event;
    fronts.push_back(fr);
    prev.push_back(kNoFront);
    next.push_back(kNoFront);
    sol.left_history_.emplace_back();
    sol.right_history_.emplace_back();
    return fr.id;
  };
  auto link = [&](std::size_t a, std::size_t b) {
    if (a != kNoFront) next[a] = b;
    if (b != kNoFront) prev[b] = a;
  };

  std::priority_queue<Collision, std::vector<Collision>, LaterCollision> queue;
  auto schedule = [&](std::size_t a, std::size_t b, double now) {
    if (a == kNoFront || b == kNoFront) return;
    const Front& A = fronts[a];
    const Front& B = fronts[b];
    if (!(A.speed > B.speed)) return;
    double ref = std::max(A.birth_time, B.birth_time);
    double gap = std::max(0.0, B.position(ref) - A.position(ref));
    double t = std::max(ref + gap / (A.speed - B.speed), now);
    if (t > T) return;
    queue.push({t, A.position(t), a, b});
  };

  // Riemann fans of the initial data.
  std::size_t rightmost = kNoFront;
  const auto& xs = initial.breakpoints();
  const auto& cs = initial.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::size_t ev = events.size();
    Event e;
    e.time = 0.0;
    e.position = xs[i];
    e.left_state = cs[i];
    e.right_state = cs[i + 1];
    events.push_back(e);
    for (const Front& fr : solve_riemann(f, cs[i], cs[i + 1], xs[i], 0.0)) {
      std::size_t id = add_front(fr, ev);
      events[ev].outgoing.push_back(id);
      link(rightmost, id);
      rightmost = id;
    }
  }
  for (Event& e : events) {
    e.left_neighbor = prev[e.outgoing.front()];
    e.right_neighbor = next[e.outgoing.back()];
  }
  for (std::size_t id = 0; id < fronts.size(); ++id) {
    sol.left_history_[id].emplace_back(0.0, prev[id]);
    sol.right_history_[id].emplace_back(0.0, next[id]);
    schedule(id, next[id], 0.0);
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::size_t collisions = 0;
  while (!queue.empty()) {
    Collision c = queue.top();
    if (c.time > T) break;
    queue.pop();
    if (fronts[c.left].death_time != inf || fronts[c.right].death_time != inf ||
        next[c.left] != c.right) {
      continue;
    }
    if (++collisions > options.max_events) {
      throw SolverError("evolve: event cap of " + std::to_string(options.max_events) +
                        " exceeded at t = " + std::to_string(c.time));
    }
    const double t = c.time;
    const double x = c.position;

    std::size_t first = c.left;
    std::size_t last = c.right;
    while (prev[first] != kNoFront &&
           std::abs(fronts[prev[first]].position(t) - x) <= options.merge_tolerance) {
      first = prev[first];
    }
    while (next[last] != kNoFront &&
           std::abs(fronts[next[last]].position(t) - x) <= options.merge_tolerance) {
      last = next[last];
    }
    const std::size_t P = prev[first];
    const std::size_t Q = next[last];

    std::size_t ev = events.size();
    Event e;
    e.time = t;
    e.position = x;
    e.left_state = fronts[first].left_value;
    e.right_state = fronts[last].right_value;
    for (std::size_t id = first;; id = next[id]) {
      e.incoming.push_back(id);
      fronts[id].death_time = t;
      fronts[id].death_event = ev;
      if (id == last) break;
    }
    events.push_back(e);

    std::vector<std::size_t> out;
    if (std::abs(e.left_state - e.right_state) > options.zero_strength) {
      for (const Front& fr : solve_riemann(f, e.left_state, e.right_state, x, t)) {
        out.push_back(add_front(fr, ev));
      }
    }
    std::size_t cursor = P;
    for (std::size_t id : out) {
      link(cursor, id);
      cursor = id;
    }
    link(cursor, Q);

    events[ev].outgoing = out;
    events[ev].left_neighbor = P;
    events[ev].right_neighbor = Q;
    if (P != kNoFront) sol.right_history_[P].emplace_back(t, next[P]);
    if (Q != kNoFront) sol.left_history_[Q].emplace_back(t, prev[Q]);
    for (std::size_t id : out) {
      sol.left_history_[id].emplace_back(t, prev[id]);
      sol.right_history_[id].emplace_back(t, next[id]);
    }

    if (out.empty()) {
      schedule(P, Q, t);
    } else {
      schedule(P, out.front(), t);
      schedule(out.back(), Q, t);
    }
  }
  return sol;
}

std::pair<double, double> evaluate_field(const FrontTrackingSolution& sol, double x, double t) {
  if (!(t >= 0.0 && t <= sol.horizon())) {
    throw RangeError("evaluate_field: time " + std::to_string(t) + " outside [0, T]");
  }
  // Nearest front strictly left of x, and fronts located at x.
  const Front* left = nullptr;
  const Front* on_lo = nullptr;
  const Front* on_hi = nullptr;
  for (const Front& fr : sol.fronts()) {
    if (!fr.alive_at(t)) continue;
    double p = fr.position(t);
    if (std::abs(p - x) <= kLocateTolerance) {
      if (!on_lo || fr.speed < on_lo->speed) on_lo = &fr;
      if (!on_hi || fr.speed > on_hi->speed) on_hi = &fr;
    } else if (p < x) {
      if (!left) {
        left = &fr;
      } else {
        double q = left->position(t);
        if (p > q || (p == q && fr.speed > left->speed)) left = &fr;
      }
    }
  }
  if (on_lo) return {on_lo->left_value, on_hi->right_value};
  double v = left ? left->right_value : sol.left_far();
  return {v, v};
}

StepFunction slice(const FrontTrackingSolution& sol, double t) {
  if (!(t >= 0.0 && t <= sol.horizon())) {
    throw RangeError("slice: time " + std::to_string(t) + " outside [0, T]");
  }
  std::vector<std::size_t> ids = sol.alive_fronts(t);
  std::vector<double> xs;
  std::vector<double> vs{sol.left_far()};
  for (std::size_t i = 0; i < ids.size();) {
    double p = sol.front(ids[i]).position(t);
    std::size_t j = i;
    while (j + 1 < ids.size() &&
           std::abs(sol.front(ids[j + 1]).position(t) - p) <= kLocateTolerance) {
      ++j;
    }
    xs.push_back(p);
    vs.push_back(sol.front(ids[j]).right_value);
    i = j + 1;
  }
  return StepFunction(std::move(xs), std::move(vs));
}

std::vector<ShockRecord> shock_catalog(const FrontTrackingSolution& sol, double eps) {
  if (eps < 0.0) throw PreconditionError("shock_catalog: eps must be nonnegative");
  std::vector<ShockRecord> out;
  for (const Front& fr : sol.fronts()) {
    if (!(fr.strength() > eps)) continue;
    ShockRecord r;
    r.front_id = fr.id;
    r.t_begin = fr.birth_time;
    r.t_end = std::min(fr.death_time, sol.horizon());
    r.x_begin = fr.position(r.t_begin);
    r.x_end = fr.position(r.t_end);
    r.strength = fr.strength();
    r.speed = fr.speed;
    out.push_back(r);
  }
  return out;
}

double distance_to_shocks(const std::vector<ShockRecord>& shocks, double x, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const ShockRecord& s : shocks) {
    double dt = s.t_end - s.t_begin;
    double dx = s.x_end - s.x_begin;
    double len2 = dt * dt + dx * dx;
    double u = 0.0;
    if (len2 > 0.0) {
      u = std::clamp(((t - s.t_begin) * dt + (x - s.x_begin) * dx) / len2, 0.0, 1.0);
    }
    double ex = x - (s.x_begin + u * dx);
    double et = t - (s.t_begin + u * dt);
    best = std::min(best, std::hypot(ex, et));
  }
  return best;
}

}  // namespace shockline
