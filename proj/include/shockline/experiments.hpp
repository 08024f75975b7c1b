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

#ifndef SHOCKLINE_EXPERIMENTS_HPP_
#define SHOCKLINE_EXPERIMENTS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "shockline/flux.hpp"
#include "shockline/front_tracking.hpp"
#include "shockline/step_function.hpp"
#include "shockline/trajectory.hpp"

namespace shockline {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log e against log eps. Points with e < 1e-12 or
/// eps <= 0 are ignored; fewer than three usable points throws FitError.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& errors);

struct RateReport {
  std::string name;
  std::vector<double> eps;
  std::vector<double> errors;
  /// constant * sqrt(eps_i).
  std::vector<double> bounds;
  /// Measured size of each perturbation: L1 window norm for initial-field
  /// runs, Lipschitz distance for velocity runs.
  std::vector<double> input_l1;
  std::vector<double> input_linf;
  double constant = 0.0;
  bool fitted = false;
  RateFit fit;
  bool bound_ok = false;
  bool hypotheses_ok = false;
  std::vector<std::string> notes;
};

enum class InitialPerturbation { JumpShift, HeightDither, AddedStep };
enum class VelocityPerturbation { Scale, Smooth };

const char* to_string(InitialPerturbation p);
const char* to_string(VelocityPerturbation p);

/// Initial datum at L1 distance eps from rho0 (before projection onto
/// [m_rho, 1]):
///  - JumpShift moves every jump right by eps / TV(rho0);
///  - HeightDither adds alternating +-eps / (x_k - x_1) to the interior values;
///  - AddedStep adds a step of height +-eps on [anchor, anchor + 1].
StepFunction perturb_initial(const StepFunction& rho0, InitialPerturbation kind, double eps,
                             double m_rho, double anchor);

/// w_bar with ||w - w_bar||_Lip = eps that stays in the admissible class:
///  - Scale: (1 + eps / L_w) w;
///  - Smooth: w + eps (1 - rho)^2 / 2 tabulated on a 2^-12 grid, rescaled by
///    the steepest chord so the distance is exactly eps.
VelocityFunction perturb_velocity(const VelocityFunction& w, VelocityPerturbation kind,
                                  double eps);

/// Constant of the initial-field trajectory bound.
double initial_stability_constant(double T, double t0, double m_rho, double L_w, double tv,
                                  double tv_bar);
/// Constant of the velocity trajectory bound.
double velocity_stability_constant(double T, double t0, double m_rho, double w_lip, double tv);

struct InitialStabilityConfig {
  StepFunction rho0;
  VelocityFunction w = VelocityFunction::linear_traffic();
  InitialPerturbation family = InitialPerturbation::JumpShift;
  std::vector<double> eps;
  double x0 = 0.0;
  double t0 = 0.25;
  double T = 2.0;
  int level = 12;
  /// Left end of the added-step perturbation.
  double anchor = 0.0;
  std::size_t jobs = 1;
};

RateReport initial_field_stability(const InitialStabilityConfig& config);

struct FluxStabilityConfig {
  StepFunction rho0;
  VelocityFunction w = VelocityFunction::linear_traffic();
  VelocityPerturbation family = VelocityPerturbation::Scale;
  std::vector<double> eps;
  double x0 = 0.0;
  double t0 = 0.25;
  double T = 2.0;
  int level = 12;
  std::size_t jobs = 1;
};

RateReport flux_stability(const FluxStabilityConfig& config);

/// Smallest value of min(w(left), w(right)) - speed over all fronts.
double shock_speed_margin(const FrontTrackingSolution& sol, const VelocityFunction& w);

struct BurgersCheck {
  double l1_discrepancy = 0.0;
  double max_front_offset = 0.0;
  std::size_t fronts = 0;
};

/// Solves the traffic problem directly and through v = 1 - 2 rho with Burgers
/// flux v^2/2 on matched breakpoint grids, then compares at T.
BurgersCheck burgers_transform_check(const StepFunction& rho0, double T, int level);

struct ConvergenceReport {
  std::vector<double> parameters;
  std::vector<double> errors;
  bool monotone = false;
  /// Smallest speed margin of the oracle's fronts; positive means every shock
  /// is slower than the particles on both sides.
  double shock_margin = 0.0;
};

/// sup |z^N - z^{N_ref}| for front-tracking levels N against a reference level.
ConvergenceReport trajectory_convergence(const StepFunction& rho0, const FluxFunction& f,
                                         const VelocityFunction& w, const std::vector<int>& levels,
                                         int reference_level, double x0, double t0, double T,
                                         std::size_t jobs = 1);

/// sup |z^eps - z| for viscous trajectories against the front-tracking oracle.
ConvergenceReport viscous_convergence(const StepFunction& rho0, const FluxFunction& f,
                                      const VelocityFunction& w, const std::vector<double>& eps,
                                      std::size_t cells, int oracle_level, double x0, double t0,
                                      double T, std::size_t jobs = 1);

}  // namespace shockline

#endif  // SHOCKLINE_EXPERIMENTS_HPP_
