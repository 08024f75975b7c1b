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

#include "shockline/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include "shockline/bayes.hpp"
#include "shockline/error.hpp"
#include "shockline/experiments.hpp"
#include "shockline/io.hpp"
#include "shockline/trajectory.hpp"
#include "shockline/viscous.hpp"

namespace shockline::cli {

namespace {

using io::json;

class CheckFailed : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string config;
  std::string out = "shockline-out";
  std::optional<std::uint64_t> seed;
  bool check = false;
  std::size_t jobs = 1;
};

struct Scenario {
  json raw;
  std::filesystem::path dir;
  VelocityFunction w = VelocityFunction::linear_traffic();
  FluxFunction f = FluxFunction::traffic_quadratic();
  std::optional<StepFunction> initial;
  double T = 2.0;
  int level = 8;
  bool quantize = false;
  double x0 = 0.0;
  double t0 = 0.25;
  std::uint64_t seed = 1;

  const StepFunction& initial_field() const {
    if (!initial) throw ConfigError("scenario: missing 'initial'");
    return *initial;
  }
  /// Initial data as handed to front tracking.
  StepFunction tracked_initial() const {
    return quantize ? quantize_floor(initial_field(), level, f.lower(), f.upper())
                    : initial_field();
  }
  const json& block(const char* key) const {
    if (!raw.contains(key) || !raw[key].is_object()) {
      throw ConfigError(std::string("scenario: missing '") + key + "' block");
    }
    return raw[key];
  }
};

template <typename T>
T value_or(const json& j, const char* key, const T& fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Scenario load(const Options& opt) {
  Scenario s;
  s.raw = json::parse(io::read_file(opt.config));
  if (!s.raw.is_object()) throw ConfigError("scenario: top level must be an object");
  s.dir = std::filesystem::path(opt.config).parent_path();
  const json& j = s.raw;
  json flux = j.value("flux", json::object());
  if (j.contains("velocity")) {
    s.w = io::parse_velocity(j["velocity"]);
  } else if (value_or<std::string>(flux, "kind", "traffic-quadratic") == "traffic-quadratic") {
    s.w = VelocityFunction::linear_traffic(value_or(flux, "w_max", 1.0),
                                           value_or(flux, "rho_max", 1.0));
  }
  s.f = io::parse_flux(flux, s.w);
  if (j.contains("initial")) s.initial = io::parse_step(j["initial"]);
  s.T = value_or(j, "horizon", s.T);
  if (!(s.T > 0.0)) throw ConfigError("scenario: horizon must be positive");
  s.level = value_or(j, "level", s.level);
  if (s.level < 1 || s.level > 24) throw ConfigError("scenario: level must lie in [1, 24]");
  s.quantize = value_or(j, "quantize", s.quantize);
  json start = j.value("start", json::object());
  s.x0 = value_or(start, "x0", s.x0);
  s.t0 = value_or(start, "t0", s.t0);
  s.seed = opt.seed ? *opt.seed : value_or<std::uint64_t>(j, "seed", s.seed);
  if (s.initial) {
    const StepFunction& v = *s.initial;
    if (v.min_value() < s.f.lower() || v.max_value() > s.f.upper()) {
      throw ConfigError("scenario: initial values leave the flux domain");
    }
  }
  // Stability runs need densities bounded away from zero.
  if (j.contains("stability") && s.initial && !(s.initial->min_value() > 0.0)) {
    throw ConfigError("scenario: stability runs need a positive minimum density");
  }
  return s;
}

std::string out_dir(const Options& opt) {
  if (const char* env = std::getenv("SHOCKLINE_OUT"); env != nullptr && *env != '\0') return env;
  return opt.out;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

FrontTrackingSolution solve_scenario(const Scenario& s) {
  return evolve(s.tracked_initial(), tracking_flux(s.f, s.level), s.T);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw CheckFailed("check failed: " + what);
}

int cmd_solve(const Options& opt, std::ostream& out) {
  Scenario s = load(opt);
  FrontTrackingSolution sol = solve_scenario(s);
  std::vector<double> times = value_or(s.raw, "slice_times", std::vector<double>{0.0, s.T});
  std::vector<StepFunction> slices;
  for (double t : times) slices.push_back(slice(sol, t));
  const std::string dir = out_dir(opt);
  io::write_atomic(join(dir, "events.json"), io::event_log(sol).dump(2) + "\n");
  io::write_atomic(join(dir, "slices.csv"), io::slices_csv(times, slices));
  out << "solve: " << sol.fronts().size() << " fronts, " << sol.collision_count()
      << " collisions\n";
  if (opt.check) {
    const PiecewiseLinearFlux& fn = sol.flux();
    for (const Front& fr : sol.fronts()) {
      double rh = (fn(fr.left_value) - fn(fr.right_value)) / (fr.left_value - fr.right_value);
      require(std::abs(rh - fr.speed) <= 1e-12, "Rankine-Hugoniot speed of front " +
                                                    std::to_string(fr.id));
    }
    double tv = sol.initial().total_variation();
    for (std::size_t k = 0; k < slices.size(); ++k) {
      require(slices[k].total_variation() <= tv + 1e-12, "total variation growth");
    }
  }
  return kOk;
}

int cmd_track(const Options& opt, std::ostream& out) {
  Scenario s = load(opt);
  FrontTrackingSolution sol = solve_scenario(s);
  Trajectory z = track(sol, s.w, s.x0, s.t0, s.T);
  io::write_atomic(join(out_dir(opt), "trajectory.csv"), io::trajectory_csv(z));
  out << "track: " << z.times.size() << " nodes, z(T) = " << io::format_number(z.positions.back())
      << "\n";
  if (opt.check) {
    InclusionReport r = check_filippov_inclusion(z, sol, s.w);
    require(r.ok, "differential inclusion, violation " + io::format_number(r.max_violation));
  }
  return kOk;
}

InitialPerturbation initial_family(const std::string& name) {
  for (auto p : {InitialPerturbation::JumpShift, InitialPerturbation::HeightDither,
                 InitialPerturbation::AddedStep}) {
    if (name == to_string(p)) return p;
  }
  throw ConfigError("stability: unknown initial perturbation '" + name + "'");
}

VelocityPerturbation velocity_family(const std::string& name) {
  for (auto p : {VelocityPerturbation::Scale, VelocityPerturbation::Smooth}) {
    if (name == to_string(p)) return p;
  }
  throw ConfigError("stability: unknown velocity perturbation '" + name + "'");
}

int cmd_stability(const Options& opt, std::ostream& out) {
  Scenario s = load(opt);
  const json& b = s.block("stability");
  std::string kind = value_or<std::string>(b, "kind", "initial");
  std::vector<double> eps = value_or(b, "eps", std::vector<double>{});
  RateReport report;
  bool initial = kind == "initial";
  if (initial) {
    InitialStabilityConfig c;
    c.rho0 = s.initial_field();
    c.w = s.w;
    c.family = initial_family(value_or<std::string>(b, "family", "jump-shift"));
    c.eps = eps;
    c.x0 = s.x0;
    c.t0 = s.t0;
    c.T = s.T;
    c.level = s.level;
    c.anchor = value_or(b, "anchor", c.anchor);
    c.jobs = opt.jobs;
    report = initial_field_stability(c);
  } else if (kind == "velocity") {
    FluxStabilityConfig c;
    c.rho0 = s.initial_field();
    c.w = s.w;
    c.family = velocity_family(value_or<std::string>(b, "family", "scale"));
    c.eps = eps;
    c.x0 = s.x0;
    c.t0 = s.t0;
    c.T = s.T;
    c.level = s.level;
    c.jobs = opt.jobs;
    report = flux_stability(c);
  } else {
    throw ConfigError("stability: kind must be 'initial' or 'velocity'");
  }
  const std::string dir = out_dir(opt);
  io::write_atomic(join(dir, "report.json"), io::to_json(report).dump(2) + "\n");
  io::write_atomic(join(dir, "report.csv"), io::rate_csv(report));
  if (!report.fitted) {
    throw FitError(report.notes.empty() ? "rate fit failed" : report.notes.back());
  }
  out << report.name << ": slope " << io::format_number(report.fit.slope) << ", bound "
      << (report.bound_ok ? "holds" : "violated") << "\n";
  if (opt.check) {
    require(report.hypotheses_ok, "perturbations exceed eps");
    require(report.bound_ok, "trajectory bound");
    if (initial) require(report.fit.slope >= 0.45, "fitted slope below 0.45");
  }
  return kOk;
}

int cmd_viscous(const Options& opt, std::ostream& out) {
  Scenario s = load(opt);
  const json& b = s.block("viscous");
  double eps = value_or(b, "eps", 0.0);
  auto cells = value_or<std::size_t>(b, "cells", 2000);
  GridSpec grid = default_grid(s.initial_field(), s.f, s.w, eps, s.T, cells);
  grid.x_min = value_or(b, "x_min", grid.x_min);
  grid.x_max = value_or(b, "x_max", grid.x_max);
  GridField g = solve_viscous(s.initial_field(), s.f, eps, grid, s.T);
  std::vector<double> times = value_or(b, "snapshot_times", std::vector<double>{0.0, s.T});
  std::string csv = "t,x,v\n";
  for (double t : times) {
    if (t < 0.0 || t > s.T) throw ConfigError("viscous: snapshot time outside [0, T]");
    std::vector<double> v = g.values_at(t);
    for (std::size_t i = 0; i < v.size(); ++i) {
      csv += io::format_number(t) + "," + io::format_number(g.cell_center(i)) + "," +
             io::format_number(v[i]) + "\n";
    }
  }
  const std::string dir = out_dir(opt);
  io::write_atomic(join(dir, "snapshots.csv"), csv);
  if (s.raw.contains("start")) {
    io::write_atomic(join(dir, "trajectory.csv"),
                     io::trajectory_csv(track_smooth(g, s.w, s.x0, s.t0, s.T)));
  }
  out << "viscous: " << g.cells() << " cells, dt = " << io::format_number(g.dt()) << ", "
      << g.level_count() << " stored levels\n";
  if (opt.check) {
    const StepFunction& v0 = s.initial_field();
    for (std::size_t k = 0; k < g.level_count(); ++k) {
      auto [lo, hi] = std::minmax_element(g.level(k).begin(), g.level(k).end());
      require(*lo >= v0.min_value() - 1e-8 && *hi <= v0.max_value() + 1e-8, "maximum principle");
      double drift = g.mass(k) + g.boundary_outflow(k) - g.mass(0);
      require(std::abs(drift) <= 1e-8, "discrete conservation");
    }
  }
  return kOk;
}

ForwardModel parse_forward(const Scenario& s, const json& j) {
  ForwardModel m;
  std::string solver = value_or<std::string>(j, "solver", "front-tracking");
  if (solver == "front-tracking") {
    m.solver = ForwardSolver::FrontTracking;
  } else if (solver == "viscous") {
    m.solver = ForwardSolver::Viscous;
  } else {
    throw ConfigError("forward: unknown solver '" + solver + "'");
  }
  m.level = value_or(j, "level", s.level);
  m.quantize_initial = value_or(j, "quantize", s.quantize);
  m.viscosity = value_or(j, "viscosity", 0.0);
  m.cells = value_or<std::size_t>(j, "cells", m.cells);
  m.velocity = s.w;
  if (s.initial) m.initial = *s.initial;
  return m;
}

// Observation template for synth: times, kind and start, no values.
ObservationSet observation_template(const Scenario& s, const json& j) {
  json t = j;
  if (!t.contains("x0")) t["x0"] = s.x0;
  if (!t.contains("t0")) t["t0"] = s.t0;
  if (!t.contains("gamma")) t["gamma"] = 0.0;
  ObservationSet o = io::parse_observations(t);
  return o;
}

int cmd_synth(const Options& opt, std::ostream& out) {
  Scenario s = load(opt);
  const json& b = s.block("synthetic");
  ObservationSet tmpl = observation_template(s, b);
  ForwardModel fm = parse_forward(s, s.raw.value("forward", json::object()));
  std::vector<double> clean;
  json truth;
  if (b.contains("prior_seed")) {
    PriorSpec prior = io::parse_prior(s.block("prior"));
    auto draw_seed = value_or<std::uint64_t>(b, "prior_seed", 0);
    Eigen::VectorXd latent = LatentGaussian(prior).draw(draw_seed);
    clean = forward_map(prior, fm, tmpl, latent);
    truth["prior_seed"] = draw_seed;
    truth["latent"] = std::vector<double>(latent.data(), latent.data() + latent.size());
    if (prior.kind == PriorKind::InitialField) truth["initial"] = io::to_json(initial_field(prior, latent));
  } else {
    clean = observe(s.initial_field(), s.w, fm, tmpl);
    truth["initial"] = io::to_json(s.initial_field());
  }
  ObservationSet obs = synthesize(tmpl, clean, s.seed);
  json j = io::to_json(obs);
  j["clean"] = clean;
  j["seed"] = s.seed;
  j["truth"] = truth;
  io::write_atomic(join(out_dir(opt), "observations.json"), j.dump(2) + "\n");
  out << "synth: " << obs.values.size() << " observations\n";
  return kOk;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int cmd_invert(const Options& opt, std::ostream& out) {
  Scenario s = load(opt);
  PriorSpec prior = io::parse_prior(s.block("prior"));
  ObservationSet obs;
  if (s.raw.contains("observations_file")) {
    std::filesystem::path p = s.raw["observations_file"].get<std::string>();
    if (p.is_relative()) p = s.dir / p;
    obs = io::parse_observations(json::parse(io::read_file(p.string())));
  } else {
    obs = io::parse_observations(s.block("observations"));
  }
  if (obs.values.size() != obs.times.size()) throw ConfigError("invert: observations need values");
  ForwardModel fm = parse_forward(s, s.raw.value("forward", json::object()));
  if (prior.kind == PriorKind::Velocity && !s.initial) {
    throw ConfigError("invert: velocity inversion needs the 'initial' field");
  }
  json sampler = s.raw.value("sampler", json::object());
  PcnOptions pcn;
  pcn.length = value_or<std::size_t>(sampler, "length", pcn.length);
  pcn.beta = value_or(sampler, "beta", pcn.beta);
  pcn.seed = s.seed;
  auto burn_in = value_or<std::size_t>(sampler, "burn_in", pcn.length / 5);
  if (burn_in > pcn.length) throw ConfigError("invert: burn-in longer than the chain");
  PosteriorRun run = run_pcn(prior, fm, obs, pcn);

  std::string chain = "step,phi";
  for (std::size_t j = 0; j < obs.times.size(); ++j) chain += ",g" + std::to_string(j);
  chain += "\n";
  for (std::size_t k = 0; k < run.samples.size(); ++k) {
    chain += std::to_string(k) + "," + io::format_number(run.potentials[k]);
    for (double g : run.predictions[k]) chain += "," + io::format_number(g);
    chain += "\n";
  }

  // Posterior summaries of the physical field on the latent grid.
  const std::size_t n = prior.n;
  json field;
  std::vector<std::vector<double>> values(prior.kind == PriorKind::InitialField ? n : n + 1);
  for (std::size_t k = burn_in; k < run.samples.size(); ++k) {
    const Eigen::VectorXd& v = run.samples[k];
    if (prior.kind == PriorKind::InitialField) {
      for (std::size_t i = 0; i < n; ++i) values[i].push_back(positivity_map(v[static_cast<Eigen::Index>(i)]));
    } else {
      VelocityFunction w = velocity_from_latent(prior, v);
      for (std::size_t i = 0; i <= n; ++i) values[i].push_back(w.values()[i]);
    }
  }
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
  for (const auto& col : values) {
    double m = 0.0;
    for (double x : col) m += x;
    mean.push_back(m / static_cast<double>(col.size()));
    lo.push_back(quantile(col, 0.05));
    hi.push_back(quantile(col, 0.95));
  }
  LatentGaussian latent(prior);
  std::vector<double> grid = latent.points();
  if (prior.kind == PriorKind::Velocity) {
    grid.clear();
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(n));
  }
  field = {{"grid", grid}, {"mean", mean}, {"q05", lo}, {"q95", hi}};

  std::vector<double> predicted = run.mean_prediction(burn_in);
  json summary{{"acceptance_rate", run.acceptance_rate},
               {"accepted", run.accepted},
               {"length", pcn.length},
               {"beta", pcn.beta},
               {"burn_in", burn_in},
               {"seed", run.seed},
               {"data", obs.values},
               {"mean_prediction", predicted},
               {"field", field}};

  if (s.raw.contains("hellinger")) {
    const json& h = s.raw["hellinger"];
    ForwardModel ref = fm;
    ref.level = value_or(h, "reference_level", 12);
    std::vector<int> levels = value_or(h, "levels", std::vector<int>{4, 6, 8});
    auto samples = value_or<std::size_t>(h, "samples", 2000);
    std::vector<ForwardModel> ladder;
    std::vector<double> params;
    for (int l : levels) {
      ForwardModel m = fm;
      m.level = l;
      ladder.push_back(m);
      params.push_back(l);
    }
    PosteriorStudy study =
        posterior_convergence_study(prior, obs, ref, ladder, params, samples, s.seed, opt.jobs);
    std::string csv = "level,distance,std_error,discrepancy,ratio\n";
    json rows = json::array();
    for (const LadderRow& r : study.rows) {
      csv += io::format_number(r.parameter) + "," + io::format_number(r.hellinger.distance) + "," +
             io::format_number(r.hellinger.std_error) + "," + io::format_number(r.discrepancy) +
             "," + io::format_number(r.ratio) + "\n";
      rows.push_back({{"level", r.parameter},
                      {"distance", r.hellinger.distance},
                      {"std_error", r.hellinger.std_error},
                      {"discrepancy", r.discrepancy}});
    }
    io::write_atomic(join(out_dir(opt), "hellinger.csv"), csv);
    summary["hellinger"] = {{"rows", rows},
                            {"control", study.control.distance},
                            {"monotone", study.monotone},
                            {"fitted_constant", study.fitted_constant}};
  }

  const std::string dir = out_dir(opt);
  io::write_atomic(join(dir, "chain.csv"), chain);
  io::write_atomic(join(dir, "summary.json"), summary.dump(2) + "\n");
  out << "invert: acceptance " << io::format_number(run.acceptance_rate) << "\n";
  if (opt.check) {
    require(run.acceptance_rate >= 0.1 && run.acceptance_rate <= 0.9, "acceptance rate");
    for (std::size_t j = 0; j < predicted.size(); ++j) {
      require(std::abs(predicted[j] - obs.values[j]) <= 3.0 * obs.gamma,
              "posterior prediction " + std::to_string(j) + " farther than 3 gamma from data");
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Front tracking, particle trajectories and trajectory-based inversion"};
  app.require_subcommand(1);
  Options opt;
  using Handler = int (*)(const Options&, std::ostream&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto add = [&](const char* name, const char* help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Scenario JSON")->required();
    sub->add_option("--out", opt.out, "Output directory (SHOCKLINE_OUT overrides)");
    sub->add_option("--seed", opt.seed, "RNG seed, overrides the scenario seed");
    sub->add_flag("--check", opt.check, "Fail with exit code 4 when embedded checks fail");
    sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    commands.emplace_back(sub, h);
  };
  add("solve", "Front-tracking solve: event log and slices", cmd_solve);
  add("track", "Particle trajectory through the front-tracking field", cmd_track);
  add("stability", "Trajectory stability under initial or velocity perturbations", cmd_stability);
  add("invert", "pCN sampling of the posterior given trajectory data", cmd_invert);
  add("viscous", "Viscous solve and snapshots", cmd_viscous);
  add("synth", "Synthetic observations from a known field", cmd_synth);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    for (auto& [sub, handler] : commands) {
      if (sub->parsed()) return handler(opt, out);
    }
    return kConfigError;
  } catch (const CheckFailed& e) {
    err << e.what() << "\n";
    return kCheckFailed;
  } catch (const json::parse_error& e) {
    err << "parse error: " << e.what() << "\n";
    return kConfigError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kConfigError;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << "\n";
    return kSolverError;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverError;
  }
}

}  // namespace shockline::cli
