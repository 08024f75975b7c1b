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

#include "shockline/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "shockline/error.hpp"
#include "shockline/parallel.hpp"
#include "shockline/trajectory.hpp"
#include "shockline/viscous.hpp"

namespace shockline {

namespace {

double cell_integral(const GridField& g, double t, double a, double b) {
  std::vector<double> v = g.values_at(t);
  double total = 0.0;
  if (a < g.x_min()) {
    total += g.left_state() * (std::min(b, g.x_min()) - a);
    a = g.x_min();
  }
  if (b > g.x_max()) {
    total += g.right_state() * (b - std::max(a, g.x_max()));
    b = g.x_max();
  }
  if (!(a < b)) return total;
  const double dx = g.dx();
  auto first = static_cast<std::size_t>(std::floor((a - g.x_min()) / dx));
  for (std::size_t i = std::min(first, v.size() - 1); i < v.size(); ++i) {
    double lo = g.x_min() + static_cast<double>(i) * dx;
    double hi = lo + dx;
    if (lo >= b) break;
    double overlap = std::min(hi, b) - std::max(lo, a);
    if (overlap > 0.0) total += v[i] * overlap;
  }
  return total;
}

}  // namespace

LatentGaussian::LatentGaussian(const PriorSpec& spec) {
  if (spec.n == 0) throw PreconditionError("prior: latent dimension must be positive");
  if (!(spec.length_scale > 0.0) || !(spec.amplitude > 0.0) || !(spec.nugget >= 0.0)) {
    throw PreconditionError("prior: length scale and amplitude must be positive");
  }
  double lo = 0.0;
  double hi = 1.0;
  if (spec.kind == PriorKind::InitialField) {
    if (!(spec.x_min < spec.x_max)) throw PreconditionError("prior: empty window");
    lo = spec.x_min;
    hi = spec.x_max;
  }
  const std::size_t n = spec.n;
  const double h = (hi - lo) / static_cast<double>(n);
  points_.resize(n);
  for (std::size_t i = 0; i < n; ++i) points_[i] = lo + (static_cast<double>(i) + 0.5) * h;

  Eigen::MatrixXd cov(n, n);
  const double s2 = spec.amplitude * spec.amplitude;
  const double l2 = spec.length_scale * spec.length_scale;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d = points_[i] - points_[j];
      cov(i, j) = s2 * std::exp(-d * d / (2.0 * l2));
    }
    cov(i, i) += spec.nugget;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("prior: covariance is not positive definite; increase the nugget");
  }
  factor_ = llt.matrixL();
}

Eigen::VectorXd LatentGaussian::color(const Eigen::VectorXd& xi) const { return factor_ * xi; }

Eigen::VectorXd LatentGaussian::draw(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd xi(factor_.rows());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
  return color(xi);
}

double positivity_map(double v) {
  return v <= 0.0 ? 0.5 * std::exp(v) : 1.0 - 0.5 * std::exp(-v);
}

StepFunction initial_field(const PriorSpec& spec, const Eigen::VectorXd& latent) {
  if (spec.kind != PriorKind::InitialField) throw PreconditionError("prior is not an initial field");
  if (static_cast<std::size_t>(latent.size()) != spec.n) {
    throw PreconditionError("initial_field: latent size mismatch");
  }
  const double h = (spec.x_max - spec.x_min) / static_cast<double>(spec.n);
  std::vector<double> xs;
  std::vector<double> vs;
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (i > 0) xs.push_back(spec.x_min + static_cast<double>(i) * h);
    vs.push_back(positivity_map(latent[static_cast<Eigen::Index>(i)]));
  }
  return StepFunction(std::move(xs), std::move(vs));
}

VelocityFunction velocity_from_latent(const PriorSpec& spec, const Eigen::VectorXd& latent) {
  if (spec.kind != PriorKind::Velocity) throw PreconditionError("prior is not a velocity prior");
  const std::size_t n = spec.n;
  if (static_cast<std::size_t>(latent.size()) != n) {
    throw PreconditionError("velocity_from_latent: latent size mismatch");
  }
  const double top = latent.maxCoeff();
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    tail[k] = tail[k + 1] + std::exp(latent[static_cast<Eigen::Index>(k)] - top);
  }
  std::vector<double> xs(n + 1);
  std::vector<double> vs(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    xs[j] = static_cast<double>(j) / static_cast<double>(n);
    vs[j] = spec.w_max * tail[j] / tail[0];
  }
  xs[n] = 1.0;
  vs[n] = 0.0;
  return VelocityFunction::table(std::move(xs), std::move(vs));
}

void ObservationSet::validate() const {
  validate_layout();
  if (!(gamma > 0.0)) throw ConfigError("observations: noise level must be positive");
}

void ObservationSet::validate_layout() const {
  if (times.empty()) throw ConfigError("observations: need at least one time");
  for (std::size_t i = 1; i < times.size(); ++i) {
    // Field observations may share a time; trajectory samples may not.
    bool ok = kind == ObservationKind::Trajectory ? times[i] > times[i - 1]
                                                  : times[i] >= times[i - 1];
    if (!ok) throw ConfigError("observations: times must increase");
  }
  if (!values.empty() && values.size() != times.size()) {
    throw ConfigError("observations: one value per time expected");
  }
  if (kind != ObservationKind::Trajectory && points.size() != times.size()) {
    throw ConfigError("observations: field observations need one position per time");
  }
  if (kind == ObservationKind::Trajectory && !(times.front() >= t0)) {
    throw ConfigError("observations: trajectory times must not precede the start time");
  }
  if (kind == ObservationKind::BallIntegral && !(radius > 0.0)) {
    throw ConfigError("observations: ball radius must be positive");
  }
}

std::vector<double> observe(const StepFunction& rho0, const VelocityFunction& w,
                            const ForwardModel& model, const ObservationSet& obs) {
  obs.validate_layout();
  const StepFunction init = model.quantize_initial ? quantize_floor(rho0, model.level) : rho0;
  const double T = obs.horizon();
  const FluxFunction f = FluxFunction::traffic(w);
  const std::size_t J = obs.times.size();
  std::vector<double> out(J);
  if (model.solver == ForwardSolver::FrontTracking) {
    FrontTrackingSolution sol = evolve(init, tracking_flux(f, model.level), T);
    switch (obs.kind) {
      case ObservationKind::Trajectory:
        return track(sol, w, obs.x0, obs.t0, T).sample(obs.times);
      case ObservationKind::PointwiseField:
        for (std::size_t j = 0; j < J; ++j) {
          out[j] = evaluate_field(sol, obs.points[j], obs.times[j]).second;
        }
        return out;
      case ObservationKind::BallIntegral:
        for (std::size_t j = 0; j < J; ++j) {
          out[j] = slice(sol, obs.times[j]).integral(obs.points[j] - obs.radius,
                                                     obs.points[j] + obs.radius);
        }
        return out;
    }
  }
  if (!(model.viscosity > 0.0)) throw ConfigError("forward: viscous solver needs viscosity > 0");
  GridSpec grid = default_grid(init, f, w, model.viscosity, T, model.cells);
  GridField g = solve_viscous(init, f, model.viscosity, grid, T);
  switch (obs.kind) {
    case ObservationKind::Trajectory:
      return track_smooth(g, w, obs.x0, obs.t0, T).sample(obs.times);
    case ObservationKind::PointwiseField:
      for (std::size_t j = 0; j < J; ++j) out[j] = g.value(obs.points[j], obs.times[j]);
      return out;
    case ObservationKind::BallIntegral:
      for (std::size_t j = 0; j < J; ++j) {
        out[j] = cell_integral(g, obs.times[j], obs.points[j] - obs.radius,
                               obs.points[j] + obs.radius);
      }
      return out;
  }
  return out;
}

std::vector<double> forward_map(const PriorSpec& prior, const ForwardModel& model,
                                const ObservationSet& obs, const Eigen::VectorXd& latent) {
  if (prior.kind == PriorKind::InitialField) {
    return observe(initial_field(prior, latent), model.velocity, model, obs);
  }
  return observe(model.initial, velocity_from_latent(prior, latent), model, obs);
}

double potential(const ObservationSet& obs, const std::vector<double>& predicted) {
  if (std::isinf(obs.gamma)) return 0.0;
  if (predicted.size() != obs.values.size()) {
    throw PreconditionError("potential: prediction and data sizes differ");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < predicted.size(); ++j) {
    double r = obs.values[j] - predicted[j];
    sum += r * r;
  }
  return sum / (2.0 * obs.gamma * obs.gamma);
}

ObservationSet synthesize(ObservationSet tmpl, const std::vector<double>& clean,
                          std::uint64_t seed) {
  if (clean.size() != tmpl.times.size()) throw PreconditionError("synthesize: size mismatch");
  if (!(tmpl.gamma >= 0.0) || std::isinf(tmpl.gamma)) {
    throw ConfigError("synthesize: noise level must be finite and nonnegative");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  tmpl.values.resize(clean.size());
  for (std::size_t j = 0; j < clean.size(); ++j) {
    double xi = normal(rng);
    tmpl.values[j] = tmpl.gamma == 0.0 ? clean[j] : clean[j] + tmpl.gamma * xi;
  }
  return tmpl;
}

std::vector<std::pair<double, double>> filter_field_points(
    const FrontTrackingSolution& sol, const std::vector<std::pair<double, double>>& candidates,
    double eps, double delta) {
  std::vector<ShockRecord> shocks = shock_catalog(sol, eps);
  std::vector<std::pair<double, double>> kept;
  for (const auto& [x, t] : candidates) {
    if (!in_shock_neighborhood(shocks, x, t, delta)) kept.emplace_back(x, t);
  }
  return kept;
}

std::size_t shock_violations(const FrontTrackingSolution& sol, const ObservationSet& obs,
                             double eps, double delta) {
  if (obs.kind == ObservationKind::Trajectory) return 0;
  std::vector<ShockRecord> shocks = shock_catalog(sol, eps);
  std::size_t count = 0;
  for (std::size_t j = 0; j < obs.points.size(); ++j) {
    if (in_shock_neighborhood(shocks, obs.points[j], obs.times[j], delta)) ++count;
  }
  return count;
}

std::vector<double> PosteriorRun::mean_prediction(std::size_t burn_in) const {
  if (burn_in >= predictions.size()) throw PreconditionError("mean_prediction: burn-in too long");
  std::vector<double> mean(predictions[burn_in].size(), 0.0);
  for (std::size_t k = burn_in; k < predictions.size(); ++k) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += predictions[k][j];
  }
  for (double& m : mean) m /= static_cast<double>(predictions.size() - burn_in);
  return mean;
}

Eigen::VectorXd PosteriorRun::mean_latent(std::size_t burn_in) const {
  if (burn_in >= samples.size()) throw PreconditionError("mean_latent: burn-in too long");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(samples[burn_in].size());
  for (std::size_t k = burn_in; k < samples.size(); ++k) mean += samples[k];
  return mean / static_cast<double>(samples.size() - burn_in);
}

PosteriorRun run_pcn(const PriorSpec& prior, const ForwardModel& model, const ObservationSet& obs,
                     const PcnOptions& options) {
  if (!(options.beta >= 0.0 && options.beta <= 1.0)) {
    throw PreconditionError("pcn: step must lie in [0, 1]");
  }
  if (options.length == 0) throw PreconditionError("pcn: chain length must be positive");
  obs.validate();
  const bool flat = std::isinf(obs.gamma);
  if (!flat && obs.values.size() != obs.times.size()) {
    throw ConfigError("pcn: observations carry no data values");
  }
  LatentGaussian latent(prior);
  const Eigen::Index n = static_cast<Eigen::Index>(latent.dimension());
  Eigen::VectorXd v = options.start.size() == 0 ? Eigen::VectorXd::Zero(n) : options.start;
  if (v.size() != n) throw PreconditionError("pcn: start has the wrong dimension");

  std::size_t step = 0;
  auto evaluate = [&](const Eigen::VectorXd& x) {
    if (flat) return std::vector<double>{};
    try {
      return forward_map(prior, model, obs, x);
    } catch (const SolverError& e) {
      throw SolverError("pcn step " + std::to_string(step) + ": " + e.what());
    }
  };

  PosteriorRun run;
  run.seed = options.seed;
  std::vector<double> g = evaluate(v);
  double phi = potential(obs, g);
  run.samples.reserve(options.length + 1);
  run.samples.push_back(v);
  run.potentials.push_back(phi);
  run.predictions.push_back(g);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep = std::sqrt(1.0 - options.beta * options.beta);
  Eigen::VectorXd xi(n);
  for (step = 1; step <= options.length; ++step) {
    for (Eigen::Index i = 0; i < n; ++i) xi[i] = normal(rng);
    Eigen::VectorXd proposal = keep * v + options.beta * latent.color(xi);
    std::vector<double> gp = evaluate(proposal);
    double phi_p = potential(obs, gp);
    double u = unit(rng);
    if (std::log(u) < phi - phi_p) {
      v = std::move(proposal);
      phi = phi_p;
      g = std::move(gp);
      ++run.accepted;
    }
    run.samples.push_back(v);
    run.potentials.push_back(phi);
    run.predictions.push_back(g);
  }
  run.acceptance_rate = static_cast<double>(run.accepted) / static_cast<double>(options.length);
  return run;
}

std::vector<std::vector<double>> prior_predictions(const PriorSpec& prior,
                                                   const ForwardModel& model,
                                                   const ObservationSet& obs, std::size_t M,
                                                   std::uint64_t seed, std::size_t jobs) {
  obs.validate_layout();
  LatentGaussian latent(prior);
  std::vector<std::vector<double>> out(M);
  parallel_for(M, jobs, [&](std::size_t m) {
    try {
      out[m] = forward_map(prior, model, obs, latent.draw(seed + m));
    } catch (const SolverError& e) {
      throw SolverError("prior sample " + std::to_string(m) + ": " + e.what());
    }
  });
  return out;
}

HellingerEstimate hellinger_from_potentials(const std::vector<double>& phi_a,
                                            const std::vector<double>& phi_b,
                                            std::size_t batches) {
  if (phi_a.size() != phi_b.size() || phi_a.empty()) {
    throw PreconditionError("hellinger: potentials must be nonempty and of equal length");
  }
  const std::size_t M = phi_a.size();
  batches = std::clamp<std::size_t>(batches, 1, M);
  const double floor = std::log(1e-300);
  auto densities = [&](const std::vector<double>& phi, double& log_z) {
    double shift = *std::min_element(phi.begin(), phi.end());
    std::vector<double> l(M);
    double sum = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      l[m] = std::exp(-(phi[m] - shift));
      sum += l[m];
    }
    double mean = sum / static_cast<double>(M);
    log_z = -shift + std::log(mean);
    if (!(log_z >= floor)) {
      throw UnderflowError("hellinger: evidence estimate below 1e-300 (log Z = " +
                           std::to_string(log_z) + ")");
    }
    for (double& x : l) x /= mean;
    return l;
  };
  HellingerEstimate est;
  est.samples = M;
  std::vector<double> pa = densities(phi_a, est.log_z_a);
  std::vector<double> pb = densities(phi_b, est.log_z_b);
  std::vector<double> q(M);
  double total = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    double d = std::sqrt(pa[m]) - std::sqrt(pb[m]);
    q[m] = 0.5 * d * d;
    total += q[m];
  }
  const double d2 = total / static_cast<double>(M);
  est.distance = std::sqrt(d2);
  if (batches > 1 && est.distance > 0.0) {
    const std::size_t size = M / batches;
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
      std::size_t lo = b * size;
      std::size_t hi = b + 1 == batches ? M : lo + size;
      double s = 0.0;
      for (std::size_t m = lo; m < hi; ++m) s += q[m];
      means.push_back(s / static_cast<double>(hi - lo));
    }
    double mu = 0.0;
    for (double x : means) mu += x;
    mu /= static_cast<double>(batches);
    double var = 0.0;
    for (double x : means) var += (x - mu) * (x - mu);
    var /= static_cast<double>(batches - 1);
    double se_d2 = std::sqrt(var / static_cast<double>(batches));
    est.std_error = se_d2 / (2.0 * est.distance);
  }
  return est;
}

namespace {

std::vector<double> potentials_of(const ObservationSet& obs,
                                  const std::vector<std::vector<double>>& predictions) {
  std::vector<double> phi;
  phi.reserve(predictions.size());
  for (const auto& g : predictions) phi.push_back(potential(obs, g));
  return phi;
}

double max_discrepancy(const std::vector<std::vector<double>>& a,
                       const std::vector<std::vector<double>>& b) {
  double worst = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    for (std::size_t j = 0; j < a[m].size(); ++j) worst = std::max(worst, std::abs(a[m][j] - b[m][j]));
  }
  return worst;
}

}  // namespace

HellingerEstimate hellinger_between(const PriorSpec& prior, const ObservationSet& obs,
                                    const ForwardModel& a, const ForwardModel& b, std::size_t M,
                                    std::uint64_t seed, std::size_t jobs) {
  auto ga = prior_predictions(prior, a, obs, M, seed, jobs);
  auto gb = prior_predictions(prior, b, obs, M, seed, jobs);
  return hellinger_from_potentials(potentials_of(obs, ga), potentials_of(obs, gb));
}

PosteriorStudy posterior_convergence_study(const PriorSpec& prior, const ObservationSet& obs,
                                           const ForwardModel& reference,
                                           const std::vector<ForwardModel>& ladder,
                                           const std::vector<double>& parameters, std::size_t M,
                                           std::uint64_t seed, std::size_t jobs) {
  if (ladder.size() != parameters.size()) {
    throw PreconditionError("posterior study: one parameter per ladder entry");
  }
  auto g_ref = prior_predictions(prior, reference, obs, M, seed, jobs);
  std::vector<double> phi_ref = potentials_of(obs, g_ref);
  PosteriorStudy study;
  study.control = hellinger_from_potentials(phi_ref, phi_ref);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    auto g = prior_predictions(prior, ladder[i], obs, M, seed, jobs);
    LadderRow row;
    row.parameter = parameters[i];
    row.hellinger = hellinger_from_potentials(phi_ref, potentials_of(obs, g));
    row.discrepancy = max_discrepancy(g_ref, g);
    row.ratio = row.discrepancy > 0.0 ? row.hellinger.distance / std::sqrt(row.discrepancy) : 0.0;
    study.fitted_constant = std::max(study.fitted_constant, row.ratio);
    study.rows.push_back(row);
  }
  study.monotone = true;
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    if (!(study.rows[i].hellinger.distance < study.rows[i - 1].hellinger.distance)) {
      study.monotone = false;
    }
  }
  return study;
}

}  // namespace shockline
