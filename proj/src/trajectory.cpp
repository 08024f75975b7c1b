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

#include "shockline/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shockline/error.hpp"

namespace shockline {

namespace {

constexpr double kTimeTol = 1e-12;
constexpr double kPosTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Fronts leaving one space-time point, plus the live fronts beyond them.
struct Fan {
  std::size_t left = kNoFront;
  std::size_t right = kNoFront;
  std::vector<std::size_t> fronts;
  std::vector<double> states;
};

struct Motion {
  bool stuck = false;
  std::size_t left = kNoFront;
  std::size_t right = kNoFront;
  std::size_t front = kNoFront;
  double state = 0.0;
  double speed = 0.0;
};

class Tracker {
 public:
  Tracker(const FrontTrackingSolution& sol, const VelocityFunction& w) : sol_(sol), w_(w) {}

  // First live front at or right of a candidate that may have died at t.
  std::size_t walk_right(std::size_t c, double t) const {
    while (c != kNoFront && sol_.front(c).death_time <= t) {
      const Event& e = sol_.events()[sol_.front(c).death_event];
      c = e.outgoing.empty() ? e.right_neighbor : e.outgoing.front();
    }
    return c;
  }

  std::size_t walk_left(std::size_t c, double t) const {
    while (c != kNoFront && sol_.front(c).death_time <= t) {
      const Event& e = sol_.events()[sol_.front(c).death_event];
      c = e.outgoing.empty() ? e.left_neighbor : e.outgoing.back();
    }
    return c;
  }

  Fan event_fan(const Event& e) const {
    Fan fan;
    fan.left = walk_left(e.left_neighbor, e.time);
    fan.right = walk_right(e.right_neighbor, e.time);
    fan.fronts = e.outgoing;
    fan.states.push_back(e.left_state);
    for (std::size_t id : e.outgoing) fan.states.push_back(sol_.front(id).right_value);
    return fan;
  }

  Fan front_fan(std::size_t left, std::size_t id, std::size_t right) const {
    Fan fan;
    fan.left = left;
    fan.right = right;
    fan.fronts = {id};
    fan.states = {sol_.front(id).left_value, sol_.front(id).right_value};
    return fan;
  }

  Motion resolve(const Fan& fan) const {
    const std::size_t k = fan.fronts.size();
    auto lower = [&](std::size_t i) { return i == 0 ? -kInf : sol_.front(fan.fronts[i - 1]).speed; };
    auto upper = [&](std::size_t i) { return i == k ? kInf : sol_.front(fan.fronts[i]).speed; };
    auto free_in = [&](std::size_t i) {
      Motion m;
      m.left = i == 0 ? fan.left : fan.fronts[i - 1];
      m.right = i == k ? fan.right : fan.fronts[i];
      m.state = fan.states[i];
      m.speed = w_(m.state);
      return m;
    };
    std::vector<double> ws(k + 1);
    for (std::size_t i = 0; i <= k; ++i) ws[i] = w_(fan.states[i]);

    for (std::size_t i = 0; i <= k; ++i) {
      if (lower(i) < ws[i] && ws[i] < upper(i)) return free_in(i);
    }
    for (std::size_t j = 1; j <= k; ++j) {
      double s = sol_.front(fan.fronts[j - 1]).speed;
      if (ws[j - 1] >= s && s >= ws[j]) {
        Motion m;
        m.stuck = true;
        m.front = fan.fronts[j - 1];
        m.speed = s;
        return m;
      }
    }
    for (std::size_t i = 0; i <= k; ++i) {
      if (lower(i) <= ws[i] && ws[i] <= upper(i)) return free_in(i);
    }
    // Not reachable for an entropy fan; keep the least inconsistent wedge.
    std::size_t best = 0;
    double best_violation = kInf;
    for (std::size_t i = 0; i <= k; ++i) {
      double v = std::max({lower(i) - ws[i], ws[i] - upper(i), 0.0});
      if (v < best_violation) {
        best_violation = v;
        best = i;
      }
    }
    return free_in(best);
  }

  Motion initial(double x0, double t0) const {
    std::vector<std::size_t> ids = sol_.alive_fronts(t0);
    std::size_t idx = 0;
    while (idx < ids.size() && sol_.front(ids[idx]).position(t0) < x0 - kPosTol) ++idx;
    std::size_t end = idx;
    while (end < ids.size() && std::abs(sol_.front(ids[end]).position(t0) - x0) <= kPosTol) ++end;
    std::size_t left = idx > 0 ? ids[idx - 1] : kNoFront;
    std::size_t right = end < ids.size() ? ids[end] : kNoFront;
    if (end > idx) {
      Fan fan;
      fan.left = left;
      fan.right = right;
      fan.fronts.assign(ids.begin() + static_cast<std::ptrdiff_t>(idx),
                        ids.begin() + static_cast<std::ptrdiff_t>(end));
      fan.states.push_back(sol_.front(fan.fronts.front()).left_value);
      for (std::size_t id : fan.fronts) fan.states.push_back(sol_.front(id).right_value);
      return resolve(fan);
    }
    Motion m;
    m.left = left;
    m.right = right;
    m.state = left != kNoFront ? sol_.front(left).right_value : sol_.left_far();
    m.speed = w_(m.state);
    return m;
  }

 private:
  const FrontTrackingSolution& sol_;
  const VelocityFunction& w_;
};

}  // namespace

double Trajectory::at(double t) const {
  if (times.empty()) throw PreconditionError("trajectory: empty");
  if (t < times.front() - kTimeTol || t > times.back() + kTimeTol) {
    throw RangeError("trajectory: time " + std::to_string(t) + " outside the tracked interval");
  }
  if (speeds.empty()) return positions.front();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  k = std::min(k, speeds.size() - 1);
  return positions[k] + speeds[k] * (t - times[k]);
}

double Trajectory::speed_at(double t) const {
  if (speeds.empty()) return 0.0;
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return speeds[std::min(k, speeds.size() - 1)];
}

bool Trajectory::has_sticking() const {
  return std::any_of(stuck_front.begin(), stuck_front.end(),
                     [](std::size_t id) { return id != kNoFront; });
}

std::vector<double> Trajectory::sample(const std::vector<double>& ts) const {
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(at(t));
  return out;
}

Trajectory track(const FrontTrackingSolution& sol, const VelocityFunction& w, double x0,
                 double t0, double T) {
  if (!(t0 > 0.0)) {
    throw PreconditionError("track: start time t0 must be positive, got " + std::to_string(t0));
  }
  if (!(T >= t0) || T > sol.horizon() + kTimeTol) {
    throw PreconditionError("track: need t0 <= T <= solution horizon");
  }
  T = std::min(T, sol.horizon());
  Tracker tracker(sol, w);

  Trajectory out;
  out.times.push_back(t0);
  out.positions.push_back(x0);

  Motion m = tracker.initial(x0, t0);
  double ts = t0;
  double zs = x0;
  double now = t0;
  auto pos = [&](double t) { return zs + m.speed * (t - ts); };
  auto node = [&](double tn, const Motion& next) {
    if (tn > ts) {
      double zn = pos(tn);
      out.speeds.push_back(m.speed);
      out.stuck_front.push_back(m.stuck ? m.front : kNoFront);
      out.times.push_back(tn);
      out.positions.push_back(zn);
      ts = tn;
      zs = zn;
    }
    m = next;
    now = tn;
  };

  const std::size_t cap = 4 * (sol.fronts().size() + sol.events().size()) + 64;
  for (std::size_t guard = 0;; ++guard) {
    if (guard > cap) throw SolverError("track: step cap exceeded");

    if (m.stuck) {
      const Front& F = sol.front(m.front);
      if (F.death_time >= T) break;
      node(F.death_time, tracker.resolve(tracker.event_fan(sol.events()[F.death_event])));
      continue;
    }

    const double z = pos(now);
    double t_cross_left = kInf;
    double t_cross_right = kInf;
    double t_death_left = kInf;
    double t_death_right = kInf;
    if (m.left != kNoFront) {
      const Front& L = sol.front(m.left);
      t_death_left = L.death_time;
      if (L.speed > m.speed) {
        t_cross_left = now + std::max(0.0, z - L.position(now)) / (L.speed - m.speed);
      }
    }
    if (m.right != kNoFront) {
      const Front& R = sol.front(m.right);
      t_death_right = R.death_time;
      if (m.speed > R.speed) {
        t_cross_right = now + std::max(0.0, R.position(now) - z) / (m.speed - R.speed);
      }
    }
    const double t_death = std::min(t_death_left, t_death_right);
    const double t_cross = std::min(t_cross_left, t_cross_right);
    if (std::min(t_death, t_cross) >= T) break;

    if (t_death <= t_cross + kTimeTol) {
      const double td = t_death;
      const double zn = pos(td);
      const bool enclosed = m.left != kNoFront && m.right != kNoFront &&
                            sol.front(m.left).death_event == sol.front(m.right).death_event &&
                            sol.front(m.left).death_event != kNoEvent;
      bool resolved = false;
      for (std::size_t id : {m.left, m.right}) {
        if (id == kNoFront || resolved) continue;
        const Front& fr = sol.front(id);
        if (fr.death_time > td + kTimeTol) continue;
        const Event& e = sol.events()[fr.death_event];
        if (enclosed || std::abs(zn - e.position) <= kPosTol * std::max(1.0, std::abs(zn))) {
          node(td, tracker.resolve(tracker.event_fan(e)));
          resolved = true;
        }
      }
      if (resolved) continue;
      // The dying neighbours collided away from the particle; only the
      // adjacency changes, the local state and speed do not.
      if (m.right != kNoFront && sol.front(m.right).death_time <= td + kTimeTol) {
        const Event& e = sol.events()[sol.front(m.right).death_event];
        m.right = tracker.walk_right(e.outgoing.empty() ? e.right_neighbor : e.outgoing.front(),
                                     e.time);
      }
      if (m.left != kNoFront && sol.front(m.left).death_time <= td + kTimeTol) {
        const Event& e = sol.events()[sol.front(m.left).death_event];
        m.left = tracker.walk_left(e.outgoing.empty() ? e.left_neighbor : e.outgoing.back(),
                                   e.time);
      }
      now = std::max(now, td);
      continue;
    }

    const double tc = t_cross;
    if (t_cross_right <= t_cross_left) {
      std::size_t beyond = sol.neighbor(m.right, tc, Side::Right);
      node(tc, tracker.resolve(tracker.front_fan(m.left, m.right, beyond)));
    } else {
      std::size_t beyond = sol.neighbor(m.left, tc, Side::Left);
      node(tc, tracker.resolve(tracker.front_fan(beyond, m.left, m.right)));
    }
  }

  if (T > ts) {
    out.speeds.push_back(m.speed);
    out.stuck_front.push_back(m.stuck ? m.front : kNoFront);
    out.times.push_back(T);
    out.positions.push_back(pos(T));
  }
  return out;
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
  double lo = std::max(a.start_time(), b.start_time());
  double hi = std::min(a.end_time(), b.end_time());
  if (lo > hi) throw PreconditionError("sup_distance: trajectories do not overlap in time");
  double best = std::max(std::abs(a.at(lo) - b.at(lo)), std::abs(a.at(hi) - b.at(hi)));
  for (const Trajectory* z : {&a, &b}) {
    for (double t : z->times) {
      if (t > lo && t < hi) best = std::max(best, std::abs(a.at(t) - b.at(t)));
    }
  }
  return best;
}

double shock_hitting_time(const VelocityFunction& w, double rho_l, double rho_r, double a,
                          double z0) {
  if (rho_l == rho_r) return 0.0;
  double lambda = (rho_l * w(rho_l) - rho_r * w(rho_r)) / (rho_l - rho_r);
  double closing = w(rho_l) - lambda;
  if (!(closing > 0.0) || z0 > a) return kInf;
  return (a - z0) / closing;
}

double riemann_comparison(const RiemannComparison& c, double t) {
  if (c.rho_r == 0.0 || c.rho_bar_r == 0.0) {
    throw PreconditionError("riemann_comparison: right state must be nonzero");
  }
  double tau = shock_hitting_time(c.w, c.rho_l, c.rho_r, c.a, c.z0);
  double tau_bar = shock_hitting_time(c.w_bar, c.rho_bar_l, c.rho_bar_r, c.a_bar, c.z_bar0);
  if (!(t - c.t0 >= tau) || !(t - c.t0 >= tau_bar)) {
    throw PreconditionError("riemann_comparison: t must exceed both hitting times");
  }
  return (c.w_bar(c.rho_bar_r) - c.w(c.rho_r)) * (t - c.t0) +
         ((c.rho_bar_r - c.rho_bar_l) / c.rho_bar_r) * (c.a_bar - c.z_bar0) -
         ((c.rho_r - c.rho_l) / c.rho_r) * (c.a - c.z0) + c.z_bar0 - c.z0;
}

SpreadTable initial_position_spread(const FrontTrackingSolution& sol, const VelocityFunction& w,
                                    double x0, double y0, double t0, double T) {
  Trajectory x = track(sol, w, x0, t0, T);
  Trajectory y = track(sol, w, y0, t0, T);
  std::vector<double> ts = x.times;
  ts.insert(ts.end(), y.times.begin(), y.times.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  SpreadTable table;
  for (double t : ts) {
    table.times.push_back(t);
    table.spread.push_back(std::abs(x.at(t) - y.at(t)));
  }
  return table;
}

double fit_spread_exponent(const SpreadTable& table) {
  if (table.times.empty()) throw PreconditionError("fit_spread_exponent: empty table");
  const double t0 = table.times.front();
  const double s0 = table.spread.front();
  if (!(s0 > 0.0) || !(t0 > 0.0)) {
    throw PreconditionError("fit_spread_exponent: need distinct starts and t0 > 0");
  }
  double c = 0.0;
  for (std::size_t i = 1; i < table.times.size(); ++i) {
    double ratio = table.spread[i] / s0;
    double lt = std::log(table.times[i] / t0);
    if (!(lt > 0.0) || !(ratio > 1.0)) continue;
    c = std::max(c, 2.0 * std::log(ratio) / lt);
  }
  return c;
}

InclusionReport check_filippov_inclusion(const Trajectory& z, const FrontTrackingSolution& sol,
                                         const VelocityFunction& w, std::size_t samples,
                                         double tol) {
  InclusionReport report;
  const double t0 = z.start_time();
  const double t1 = z.end_time();
  if (!(t1 > t0) || samples == 0) return report;
  for (std::size_t i = 0; i < samples; ++i) {
    double t = t0 + (static_cast<double>(i) + 0.5) * (t1 - t0) / static_cast<double>(samples);
    auto [lo, hi] = evaluate_field(sol, z.at(t), t);
    double a = std::min(w(lo), w(hi));
    double b = std::max(w(lo), w(hi));
    double s = z.speed_at(t);
    double violation = std::max({a - s, s - b, 0.0});
    report.max_violation = std::max(report.max_violation, violation);
    ++report.samples;
  }
  report.ok = report.max_violation <= tol;
  return report;
}

}  // namespace shockline
