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

// Bayesian inversion of initial fields and velocity functions from one
// particle trajectory or from field observations.
#ifndef SHOCKLINE_BAYES_HPP_
#define SHOCKLINE_BAYES_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "shockline/flux.hpp"
#include "shockline/front_tracking.hpp"
#include "shockline/step_function.hpp"

namespace shockline {

enum class PriorKind { InitialField, Velocity };

/// Gaussian latent field on n points with squared-exponential covariance,
/// pushed through a positivity-preserving map.
struct PriorSpec {
  PriorKind kind = PriorKind::InitialField;
  std::size_t n = 64;
  double length_scale = 0.5;
  double amplitude = 1.0;
  /// Diagonal jitter added before factorizing.
  double nugget = 1e-8;
  /// Cell window of the initial-field latent; far fields copy the edge cells.
  double x_min = -2.0;
  double x_max = 2.0;
  /// Velocity kind: w(0).
  double w_max = 1.0;
};

/// Lower Cholesky factor of the prior covariance; the latent points are the
/// cell midpoints of the initial-field window or of [0, 1].
class LatentGaussian {
 public:
  explicit LatentGaussian(const PriorSpec& spec);

  std::size_t dimension() const { return static_cast<std::size_t>(factor_.rows()); }
  const Eigen::MatrixXd& factor() const { return factor_; }
  const std::vector<double>& points() const { return points_; }
  Eigen::VectorXd draw(std::uint64_t seed) const;
  /// factor * xi for a standard normal xi.
  Eigen::VectorXd color(const Eigen::VectorXd& xi) const;

 private:
  std::vector<double> points_;
  Eigen::MatrixXd factor_;
};

/// u = e^v / 2 for v <= 0 and 1 - e^{-v} / 2 otherwise.
double positivity_map(double v);

/// Initial field on the latent cells with values positivity_map(latent).
StepFunction initial_field(const PriorSpec& spec, const Eigen::VectorXd& latent);

/// w(rho) = w_max * int_rho^1 e^g / int_0^1 e^g with g piecewise constant on
/// n cells of [0, 1], tabulated exactly at the cell edges.
VelocityFunction velocity_from_latent(const PriorSpec& spec, const Eigen::VectorXd& latent);

enum class ObservationKind { Trajectory, PointwiseField, BallIntegral };

struct ObservationSet {
  ObservationKind kind = ObservationKind::Trajectory;
  std::vector<double> times;
  /// Field observation positions, one per time.
  std::vector<double> points;
  std::vector<double> values;
  double gamma = 1.0;
  double x0 = 0.0;
  double t0 = 0.25;
  /// Ball radius for BallIntegral observations.
  double radius = 0.05;

  /// Throws ConfigError on inconsistent sizes, unsorted times or gamma <= 0.
  void validate() const;
  /// validate() without the noise-level check.
  void validate_layout() const;
  double horizon() const { return times.back(); }
};

enum class ForwardSolver { FrontTracking, Viscous };

/// Parameter-to-observation map. For initial-field priors the velocity is
/// fixed; for velocity priors the initial field is.
struct ForwardModel {
  ForwardSolver solver = ForwardSolver::FrontTracking;
  int level = 8;
  /// Floor the initial values to the level grid before solving.
  bool quantize_initial = false;
  double viscosity = 0.0;
  std::size_t cells = 2000;
  VelocityFunction velocity = VelocityFunction::linear_traffic();
  StepFunction initial;
};

/// Observations of the solution started from rho0 under velocity w.
std::vector<double> observe(const StepFunction& rho0, const VelocityFunction& w,
                            const ForwardModel& model, const ObservationSet& obs);

/// Forward map of a latent sample.
std::vector<double> forward_map(const PriorSpec& prior, const ForwardModel& model,
                                const ObservationSet& obs, const Eigen::VectorXd& latent);

/// (1 / (2 gamma^2)) |y - G|^2; zero when gamma is infinite.
double potential(const ObservationSet& obs, const std::vector<double>& predicted);

/// y = clean + gamma * xi with xi seeded standard normal.
ObservationSet synthesize(ObservationSet tmpl, const std::vector<double>& clean,
                          std::uint64_t seed);

/// Keeps the candidate (x, t) pairs that lie outside the delta-neighbourhood
/// of shocks stronger than eps.
std::vector<std::pair<double, double>> filter_field_points(
    const FrontTrackingSolution& sol, const std::vector<std::pair<double, double>>& candidates,
    double eps = 0.05, double delta = 0.02);

/// Number of field observations inside the delta-neighbourhood of shocks
/// stronger than eps in sol.
std::size_t shock_violations(const FrontTrackingSolution& sol, const ObservationSet& obs,
                             double eps = 0.05, double delta = 0.02);

struct PcnOptions {
  std::size_t length = 10000;
  double beta = 0.1;
  std::uint64_t seed = 1;
  /// Chain start in latent coordinates; empty means the prior mean.
  Eigen::VectorXd start;
};

struct PosteriorRun {
  /// One row per chain state, including the start.
  std::vector<Eigen::VectorXd> samples;
  std::vector<double> potentials;
  std::vector<std::vector<double>> predictions;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;

  /// Mean of the predicted observations over states [burn_in, end).
  std::vector<double> mean_prediction(std::size_t burn_in) const;
  Eigen::VectorXd mean_latent(std::size_t burn_in) const;
};

PosteriorRun run_pcn(const PriorSpec& prior, const ForwardModel& model, const ObservationSet& obs,
                     const PcnOptions& options);

/// Forward values for M prior draws; draw m uses seed + m so ladders share
/// samples.
std::vector<std::vector<double>> prior_predictions(const PriorSpec& prior,
                                                   const ForwardModel& model,
                                                   const ObservationSet& obs, std::size_t M,
                                                   std::uint64_t seed, std::size_t jobs = 1);

struct HellingerEstimate {
  double distance = 0.0;
  double std_error = 0.0;
  double log_z_a = 0.0;
  double log_z_b = 0.0;
  std::size_t samples = 0;
};

/// Hellinger distance between the posteriors with potentials phi_a and phi_b
/// over common prior samples; UnderflowError if either evidence is below
/// 1e-300.
HellingerEstimate hellinger_from_potentials(const std::vector<double>& phi_a,
                                            const std::vector<double>& phi_b,
                                            std::size_t batches = 20);

HellingerEstimate hellinger_between(const PriorSpec& prior, const ObservationSet& obs,
                                    const ForwardModel& a, const ForwardModel& b, std::size_t M,
                                    std::uint64_t seed, std::size_t jobs = 1);

struct LadderRow {
  double parameter = 0.0;
  HellingerEstimate hellinger;
  /// max over samples and observations of |G_ref - G|.
  double discrepancy = 0.0;
  /// hellinger / sqrt(discrepancy).
  double ratio = 0.0;
};

struct PosteriorStudy {
  std::vector<LadderRow> rows;
  /// The reference against itself.
  HellingerEstimate control;
  bool monotone = false;
  double fitted_constant = 0.0;
};

/// Compares each ladder forward with the reference on the same prior draws.
PosteriorStudy posterior_convergence_study(const PriorSpec& prior, const ObservationSet& obs,
                                           const ForwardModel& reference,
                                           const std::vector<ForwardModel>& ladder,
                                           const std::vector<double>& parameters, std::size_t M,
                                           std::uint64_t seed, std::size_t jobs = 1);

}  // namespace shockline

#endif  // SHOCKLINE_BAYES_HPP_
