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

#include "shockline/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "shockline/error.hpp"

namespace shockline::io {

namespace {

template <typename T>
T get(const json& j, const char* key, const T& fallback) {
  if (!j.is_object()) throw ConfigError(std::string("expected an object around '") + key + "'");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing required key '") + key + "'");
  }
  return get<T>(j, key, T{});
}

// Constructors validate their own invariants; rethrow those as scenario errors.
template <typename F>
auto guarded(const char* what, F&& make) {
  try {
    return make();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  } catch (const RangeError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

VelocityFunction parse_velocity(const json& j) {
  std::string kind = get<std::string>(j, "kind", "linear-traffic");
  return guarded("velocity", [&] {
    if (kind == "linear-traffic") {
      return VelocityFunction::linear_traffic(get(j, "w_max", 1.0), get(j, "rho_max", 1.0));
    }
    if (kind == "table") {
      return VelocityFunction::table(require<std::vector<double>>(j, "breakpoints"),
                                     require<std::vector<double>>(j, "values"));
    }
    throw ConfigError("velocity: unknown kind '" + kind + "'");
  });
}

FluxFunction parse_flux(const json& j, const VelocityFunction& w) {
  std::string kind = get<std::string>(j, "kind", "traffic-quadratic");
  return guarded("flux", [&] {
    if (kind == "traffic-quadratic") {
      return FluxFunction::traffic_quadratic(get(j, "w_max", 1.0), get(j, "rho_max", 1.0));
    }
    if (kind == "burgers-quadratic") {
      return FluxFunction::burgers(get(j, "scale", 1.0), get(j, "lo", -1.0), get(j, "hi", 1.0));
    }
    if (kind == "piecewise-linear") {
      return FluxFunction::piecewise_linear(
          PiecewiseLinearFlux(require<std::vector<double>>(j, "breakpoints"),
                              require<std::vector<double>>(j, "values")));
    }
    if (kind == "traffic-velocity") return FluxFunction::traffic(w);
    throw ConfigError("flux: unknown kind '" + kind + "'");
  });
}

StepFunction parse_step(const json& j) {
  if (j.is_number()) return StepFunction::constant(j.get<double>());
  return guarded("initial", [&] {
    return StepFunction(get<std::vector<double>>(j, "breakpoints", {}),
                        require<std::vector<double>>(j, "values"));
  });
}

PriorSpec parse_prior(const json& j) {
  PriorSpec p;
  std::string kind = get<std::string>(j, "kind", "initial-field");
  if (kind == "initial-field") {
    p.kind = PriorKind::InitialField;
  } else if (kind == "velocity") {
    p.kind = PriorKind::Velocity;
  } else {
    throw ConfigError("prior: unknown kind '" + kind + "'");
  }
  p.n = get<std::size_t>(j, "n", p.n);
  p.length_scale = get(j, "length_scale", p.length_scale);
  p.amplitude = get(j, "amplitude", p.amplitude);
  p.nugget = get(j, "nugget", p.nugget);
  p.x_min = get(j, "x_min", p.x_min);
  p.x_max = get(j, "x_max", p.x_max);
  p.w_max = get(j, "w_max", p.w_max);
  return p;
}

ObservationSet parse_observations(const json& j) {
  ObservationSet o;
  std::string kind = get<std::string>(j, "kind", "trajectory");
  if (kind == "trajectory") {
    o.kind = ObservationKind::Trajectory;
  } else if (kind == "pointwise-field") {
    o.kind = ObservationKind::PointwiseField;
  } else if (kind == "ball-integral") {
    o.kind = ObservationKind::BallIntegral;
  } else {
    throw ConfigError("observations: unknown kind '" + kind + "'");
  }
  o.times = require<std::vector<double>>(j, "times");
  o.points = get<std::vector<double>>(j, "points", {});
  o.values = get<std::vector<double>>(j, "values", {});
  o.gamma = get(j, "gamma", o.gamma);
  o.x0 = get(j, "x0", o.x0);
  o.t0 = get(j, "t0", o.t0);
  o.radius = get(j, "radius", o.radius);
  o.validate_layout();
  return o;
}

json to_json(const StepFunction& v) {
  return json{{"breakpoints", v.breakpoints()}, {"values", v.values()}};
}

json to_json(const ObservationSet& obs) {
  static const char* kinds[] = {"trajectory", "pointwise-field", "ball-integral"};
  json j{{"kind", kinds[static_cast<int>(obs.kind)]},
         {"times", obs.times},
         {"values", obs.values},
         {"gamma", obs.gamma}};
  if (obs.kind == ObservationKind::Trajectory) {
    j["x0"] = obs.x0;
    j["t0"] = obs.t0;
  } else {
    j["points"] = obs.points;
  }
  if (obs.kind == ObservationKind::BallIntegral) j["radius"] = obs.radius;
  return j;
}

json to_json(const RateReport& r) {
  json j{{"name", r.name},
         {"eps", r.eps},
         {"errors", r.errors},
         {"bounds", r.bounds},
         {"input_l1", r.input_l1},
         {"input_linf", r.input_linf},
         {"constant", r.constant},
         {"bound_ok", r.bound_ok},
         {"hypotheses_ok", r.hypotheses_ok},
         {"fitted", r.fitted},
         {"notes", r.notes}};
  if (r.fitted) {
    j["slope"] = r.fit.slope;
    j["intercept"] = r.fit.intercept;
    j["fit_points"] = r.fit.points;
  }
  return j;
}

json event_log(const FrontTrackingSolution& sol) {
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json fronts = json::array();
  for (const Front& f : sol.fronts()) {
    fronts.push_back({{"id", f.id},
                      {"birth_time", f.birth_time},
                      {"birth_position", f.birth_position},
                      {"speed", f.speed},
                      {"left", f.left_value},
                      {"right", f.right_value},
                      {"death_time", finite_or_null(f.death_time)}});
  }
  json events = json::array();
  for (const Event& e : sol.events()) {
    events.push_back({{"time", e.time},
                      {"position", e.position},
                      {"incoming", e.incoming},
                      {"outgoing", e.outgoing}});
  }
  return json{{"horizon", sol.horizon()},
              {"initial", to_json(sol.initial())},
              {"collisions", sol.collision_count()},
              {"fronts", fronts},
              {"events", events}};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string slices_csv(const std::vector<double>& times, const std::vector<StepFunction>& slices) {
  std::string out = "t,x_break,value\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    const StepFunction& s = slices[k];
    std::string t = format_number(times[k]);
    out += t + ",-inf," + format_number(s.values()[0]) + "\n";
    for (std::size_t i = 0; i < s.breakpoints().size(); ++i) {
      out += t + "," + format_number(s.breakpoints()[i]) + "," + format_number(s.values()[i + 1]) +
             "\n";
    }
  }
  return out;
}

std::vector<std::pair<double, StepFunction>> parse_slices_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,x_break,value") {
    throw ConfigError("slice csv: missing header");
  }
  std::vector<std::pair<double, StepFunction>> out;
  std::vector<double> xs;
  std::vector<double> vs;
  double current = std::numeric_limits<double>::quiet_NaN();
  auto flush = [&] {
    if (!vs.empty()) out.emplace_back(current, StepFunction(xs, vs));
    xs.clear();
    vs.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a;
    std::string b;
    std::string c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
      throw ConfigError("slice csv: malformed row '" + line + "'");
    }
    try {
      double t = std::stod(a);
      if (b == "-inf") {
        flush();
        current = t;
      } else {
        if (vs.empty() || t != current) throw ConfigError("slice csv: row before far field");
        xs.push_back(std::stod(b));
      }
      vs.push_back(std::stod(c));
    } catch (const std::logic_error&) {
      throw ConfigError("slice csv: unparsable number in '" + line + "'");
    }
  }
  flush();
  return out;
}

std::string trajectory_csv(const Trajectory& z) {
  std::string out = "t,z,speed,stuck\n";
  for (std::size_t k = 0; k < z.times.size(); ++k) {
    bool last = k + 1 == z.times.size();
    out += format_number(z.times[k]) + "," + format_number(z.positions[k]) + "," +
           (last ? std::string() : format_number(z.speeds[k])) + "," +
           (last || z.stuck_front[k] == kNoFront ? std::string() : std::to_string(z.stuck_front[k])) +
           "\n";
  }
  return out;
}

std::string rate_csv(const RateReport& r) {
  std::string out = "eps,error,bound,input_l1,input_linf\n";
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    out += format_number(r.eps[i]) + "," + format_number(r.errors[i]) + "," +
           format_number(r.bounds[i]) + "," + format_number(r.input_l1[i]) + "," +
           format_number(r.input_linf[i]) + "\n";
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace shockline::io
