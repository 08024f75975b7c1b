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

#include "shockline/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shockline/error.hpp"
#include "shockline/parallel.hpp"
#include "shockline/viscous.hpp"

namespace shockline {

namespace {

constexpr double kErrorFloor = 1e-12;

void check_ladder(const std::vector<double>& eps) {
  if (eps.empty()) throw ConfigError("perturbation ladder is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] >= 0.0) || !std::isfinite(eps[i])) {
      throw ConfigError("perturbation sizes must be finite and nonnegative");
    }
    if (i > 0 && !(eps[i] < eps[i - 1])) {
      throw ConfigError("perturbation ladder must be strictly decreasing");
    }
  }
}

void check_density(const StepFunction& rho, const char* what) {
  if (!(rho.min_value() > 0.0) || rho.max_value() > 1.0) {
    throw ConfigError(std::string(what) + ": density must take values in [m_rho, 1] with m_rho > 0");
  }
}

void finish_report(RateReport& report) {
  report.bound_ok = true;
  for (std::size_t i = 0; i < report.errors.size(); ++i) {
    if (report.errors[i] > report.bounds[i]) report.bound_ok = false;
  }
  try {
    report.fit = fit_rate(report.eps, report.errors);
    report.fitted = true;
  } catch (const FitError& e) {
    report.fitted = false;
    report.notes.emplace_back(e.what());
  }
}

}  // namespace

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& errors) {
  if (eps.size() != errors.size()) throw PreconditionError("fit_rate: size mismatch");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] > 0.0 && errors[i] >= kErrorFloor) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(errors[i]));
    }
  }
  if (lx.size() < 3) {
    throw FitError("fit_rate: need at least 3 usable points, got " + std::to_string(lx.size()));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_rate: perturbation sizes are not distinct");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = lx.size();
  return fit;
}

const char* to_string(InitialPerturbation p) {
  switch (p) {
    case InitialPerturbation::JumpShift:
      return "jump-shift";
    case InitialPerturbation::HeightDither:
      return "height-dither";
    case InitialPerturbation::AddedStep:
      return "added-step";
  }
  return "?";
}

const char* to_string(VelocityPerturbation p) {
  switch (p) {
    case VelocityPerturbation::Scale:
      return "scale";
    case VelocityPerturbation::Smooth:
      return "smooth";
  }
  return "?";
}

StepFunction perturb_initial(const StepFunction& rho0, InitialPerturbation kind, double eps,
                             double m_rho, double anchor) {
  if (eps == 0.0) return rho0;
  if (rho0.min_value() < m_rho || rho0.max_value() > 1.0) {
    throw ConfigError("perturb_initial: base density outside [m_rho, 1]");
  }
  auto project = [&](double v) { return std::clamp(v, m_rho, 1.0); };
  const auto& xs = rho0.breakpoints();
  const auto& cs = rho0.values();
  switch (kind) {
    case InitialPerturbation::JumpShift: {
      double tv = rho0.total_variation();
      if (!(tv > 0.0)) throw ConfigError("perturb_initial: no jumps to shift");
      double shift = eps / tv;
      std::vector<double> moved(xs);
      for (double& x : moved) x += shift;
      return StepFunction(std::move(moved), cs);
    }
    case InitialPerturbation::HeightDither: {
      if (xs.size() < 2) throw ConfigError("perturb_initial: dithering needs at least two jumps");
      double h = eps / (xs.back() - xs.front());
      std::vector<double> vs(cs);
      double sign = 1.0;
      for (std::size_t i = 1; i + 1 < vs.size(); ++i) {
        double up = vs[i] + sign * h;
        vs[i] = up >= m_rho && up <= 1.0 ? up : project(vs[i] - sign * h);
        sign = -sign;
      }
      return StepFunction(xs, std::move(vs));
    }
    case InitialPerturbation::AddedStep: {
      double top = std::max(rho0(anchor), rho0.limits(anchor + 1.0).first);
      for (double x : xs) {
        if (x > anchor && x < anchor + 1.0) top = std::max(top, rho0(x));
      }
      double h = top + eps <= 1.0 ? eps : -eps;
      StepFunction bump({anchor, anchor + 1.0}, {0.0, h, 0.0});
      return combine(rho0, bump, [&](double a, double b) { return project(a + b); });
    }
  }
  return rho0;
}

VelocityFunction perturb_velocity(const VelocityFunction& w, VelocityPerturbation kind,
                                  double eps) {
  if (eps == 0.0) return w;
  switch (kind) {
    case VelocityPerturbation::Scale: {
      double factor = 1.0 + eps / w.lipschitz_norm();
      if (w.kind() == VelocityFunction::Kind::LinearTraffic) {
        return VelocityFunction::linear_traffic(w.w_max() * factor, w.rho_max());
      }
      std::vector<double> vs(w.values());
      for (double& v : vs) v *= factor;
      return VelocityFunction::table(w.breakpoints(), std::move(vs));
    }
    case VelocityPerturbation::Smooth: {
      const int level = 12;
      const std::size_t n = std::size_t{1} << level;
      std::vector<double> xs(n + 1);
      std::vector<double> vs(n + 1);
      // The steepest chord of (1 - rho)^2 / 2 on the grid is 1 - h / 2; rescale
      // so the tabulated perturbation has Lipschitz norm eps.
      const double c = eps / (1.0 - std::ldexp(0.5, -level));
      for (std::size_t j = 0; j <= n; ++j) {
        xs[j] = std::ldexp(static_cast<double>(j), -level);
        double d = 1.0 - xs[j];
        vs[j] = w(xs[j]) + c * d * d / 2.0;
      }
      return VelocityFunction::table(std::move(xs), std::move(vs));
    }
  }
  return w;
}

double initial_stability_constant(double T, double t0, double m_rho, double L_w, double tv,
                                  double tv_bar) {
  return 1.0 + (T - t0) * (1.0 + 2.0 / m_rho) * L_w + (tv + tv_bar) / m_rho;
}

double velocity_stability_constant(double T, double t0, double m_rho, double w_lip, double tv) {
  return 1.0 + 2.0 * (T - t0) * (1.0 + 2.0 / m_rho) * w_lip + 2.0 / m_rho * tv;
}

RateReport initial_field_stability(const InitialStabilityConfig& c) {
  check_ladder(c.eps);
  check_density(c.rho0, "initial_field_stability");
  if (!c.w.in_admissible_class()) {
    throw ConfigError("initial_field_stability: velocity is not strictly decreasing with w(1) = 0");
  }
  const double m_rho = c.rho0.min_value();
  const double L_w = c.w.lipschitz_norm();
  const double lo = -2.0 * L_w * c.T;
  const double hi = 3.0 * L_w * c.T;
  const PiecewiseLinearFlux f = tracking_flux(FluxFunction::traffic(c.w), c.level);
  const Trajectory z = track(evolve(c.rho0, f, c.T), c.w, c.x0, c.t0, c.T);

  RateReport report;
  report.name = std::string("initial-field/") + to_string(c.family);
  report.eps = c.eps;
  const std::size_t n = c.eps.size();
  report.errors.assign(n, 0.0);
  report.bounds.assign(n, 0.0);
  report.input_l1.assign(n, 0.0);
  report.input_linf.assign(n, 0.0);
  std::vector<double> constants(n, 0.0);
  std::vector<char> inside(n, 1);
  parallel_for(n, c.jobs, [&](std::size_t i) {
    StepFunction rb = perturb_initial(c.rho0, c.family, c.eps[i], m_rho, c.anchor);
    Trajectory zb = track(evolve(rb, f, c.T), c.w, c.x0, c.t0, c.T);
    report.errors[i] = sup_distance(z, zb);
    report.input_l1[i] = l1_distance(c.rho0, rb, lo, hi);
    report.input_linf[i] = linf_distance(c.rho0, rb, lo, hi);
    // The perturbation must live inside the window for the bound to apply.
    double total = l1_distance(c.rho0, rb, lo - 100.0, hi + 100.0);
    inside[i] = std::abs(total - report.input_l1[i]) <= 1e-12 &&
                report.input_l1[i] <= c.eps[i] * (1.0 + 1e-9) + 1e-15 &&
                rb.min_value() >= m_rho && rb.max_value() <= 1.0;
    constants[i] = initial_stability_constant(c.T, c.t0, std::min(m_rho, rb.min_value()), L_w,
                                              c.rho0.total_variation(), rb.total_variation());
    report.bounds[i] = constants[i] * std::sqrt(c.eps[i]);
  });
  report.constant = *std::max_element(constants.begin(), constants.end());
  report.hypotheses_ok = std::all_of(inside.begin(), inside.end(), [](char b) { return b != 0; });
  bool linf_small = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (report.input_linf[i] > c.eps[i] * (1.0 + 1e-9)) linf_small = false;
  }
  if (!linf_small) {
    report.notes.emplace_back(
        "sup-norm perturbation exceeds eps; only the L1 window norm is within eps");
  }
  finish_report(report);
  return report;
}

RateReport flux_stability(const FluxStabilityConfig& c) {
  check_ladder(c.eps);
  check_density(c.rho0, "flux_stability");
  if (!c.w.in_admissible_class()) {
    throw ConfigError("flux_stability: base velocity is not in the admissible class");
  }
  const double m_rho = c.rho0.min_value();
  const double tv = c.rho0.total_variation();
  const PiecewiseLinearFlux f = tracking_flux(FluxFunction::traffic(c.w), c.level);
  const Trajectory z = track(evolve(c.rho0, f, c.T), c.w, c.x0, c.t0, c.T);
  const double constant = velocity_stability_constant(c.T, c.t0, m_rho, c.w.lipschitz_norm(), tv);

  RateReport report;
  report.name = std::string("velocity/") + to_string(c.family);
  report.eps = c.eps;
  report.constant = constant;
  const std::size_t n = c.eps.size();
  report.errors.assign(n, 0.0);
  report.bounds.assign(n, 0.0);
  report.input_l1.assign(n, 0.0);
  report.input_linf.assign(n, 0.0);
  std::vector<char> admissible(n, 1);
  parallel_for(n, c.jobs, [&](std::size_t i) {
    VelocityFunction wb = perturb_velocity(c.w, c.family, c.eps[i]);
    if (!wb.in_admissible_class()) {
      throw ConfigError("flux_stability: perturbed velocity left the admissible class");
    }
    PiecewiseLinearFlux fb = tracking_flux(FluxFunction::traffic(wb), c.level);
    Trajectory zb = track(evolve(c.rho0, fb, c.T), wb, c.x0, c.t0, c.T);
    report.errors[i] = sup_distance(z, zb);
    report.input_l1[i] = lipschitz_distance(c.w, wb);
    report.input_linf[i] = report.input_l1[i];
    admissible[i] = report.input_l1[i] <= c.eps[i] * (1.0 + 1e-9) + 1e-15;
    report.bounds[i] = constant * std::sqrt(c.eps[i]);
  });
  report.hypotheses_ok =
      std::all_of(admissible.begin(), admissible.end(), [](char b) { return b != 0; });
  finish_report(report);
  return report;
}

double shock_speed_margin(const FrontTrackingSolution& sol, const VelocityFunction& w) {
  double margin = std::numeric_limits<double>::infinity();
  for (const Front& fr : sol.fronts()) {
    margin = std::min(margin, std::min(w(fr.left_value), w(fr.right_value)) - fr.speed);
  }
  return margin;
}

BurgersCheck burgers_transform_check(const StepFunction& rho0, double T, int level) {
  if (rho0.min_value() < 0.0 || rho0.max_value() > 1.0) {
    throw ConfigError("burgers_transform_check: density must lie in [0, 1]");
  }
  PiecewiseLinearFlux ft = piecewise_linearize(FluxFunction::traffic_quadratic(), level);
  PiecewiseLinearFlux fb = piecewise_linearize(FluxFunction::burgers(1.0, -1.0, 1.0), level);
  FrontTrackingSolution direct = evolve(rho0, ft, T);
  FrontTrackingSolution burgers =
      evolve(rho0.map_values([](double r) { return 1.0 - 2.0 * r; }), fb, T);
  StepFunction a = slice(direct, T);
  StepFunction b = slice(burgers, T).map_values([](double v) { return (1.0 - v) / 2.0; });

  double lo = -1.0;
  double hi = 1.0;
  if (!rho0.breakpoints().empty()) {
    lo = rho0.breakpoints().front() - T - 1.0;
    hi = rho0.breakpoints().back() + T + 1.0;
  }
  BurgersCheck out;
  out.l1_discrepancy = l1_distance(a, b, lo, hi);
  out.fronts = a.breakpoints().size();
  if (a.breakpoints().size() != b.breakpoints().size()) {
    out.max_front_offset = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t i = 0; i < a.breakpoints().size(); ++i) {
      out.max_front_offset =
          std::max(out.max_front_offset, std::abs(a.breakpoints()[i] - b.breakpoints()[i]));
    }
  }
  return out;
}

namespace {

bool strictly_decreasing(const std::vector<double>& e) {
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] < e[i - 1])) return false;
  }
  return true;
}

}  // namespace

ConvergenceReport trajectory_convergence(const StepFunction& rho0, const FluxFunction& f,
                                         const VelocityFunction& w, const std::vector<int>& levels,
                                         int reference_level, double x0, double t0, double T,
                                         std::size_t jobs) {
  FrontTrackingSolution ref = evolve(rho0, piecewise_linearize(f, reference_level), T);
  Trajectory z_ref = track(ref, w, x0, t0, T);
  ConvergenceReport report;
  report.shock_margin = shock_speed_margin(ref, w);
  report.parameters.assign(levels.begin(), levels.end());
  report.errors.assign(levels.size(), 0.0);
  parallel_for(levels.size(), jobs, [&](std::size_t i) {
    FrontTrackingSolution sol = evolve(rho0, piecewise_linearize(f, levels[i]), T);
    report.errors[i] = sup_distance(track(sol, w, x0, t0, T), z_ref);
  });
  report.monotone = strictly_decreasing(report.errors);
  return report;
}

ConvergenceReport viscous_convergence(const StepFunction& rho0, const FluxFunction& f,
                                      const VelocityFunction& w, const std::vector<double>& eps,
                                      std::size_t cells, int oracle_level, double x0, double t0,
                                      double T, std::size_t jobs) {
  FrontTrackingSolution oracle = evolve(rho0, tracking_flux(f, oracle_level), T);
  Trajectory z = track(oracle, w, x0, t0, T);
  ConvergenceReport report;
  report.shock_margin = shock_speed_margin(oracle, w);
  report.parameters = eps;
  report.errors.assign(eps.size(), 0.0);
  parallel_for(eps.size(), jobs, [&](std::size_t i) {
    GridField g = solve_viscous(rho0, f, eps[i], default_grid(rho0, f, w, eps[i], T, cells), T);
    report.errors[i] = sup_distance(track_smooth(g, w, x0, t0, T), z);
  });
  report.monotone = strictly_decreasing(report.errors);
  return report;
}

}  // namespace shockline
