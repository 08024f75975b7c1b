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

#ifndef SHOCKLINE_FLUX_HPP_
#define SHOCKLINE_FLUX_HPP_

#include <cstddef>
#include <variant>
#include <vector>

namespace shockline {

/// One-sided selector for derivatives at kinks.
enum class Side { Left, Right };

/// Continuous piecewise-linear function on [breakpoints.front(), breakpoints.back()].
///
/// Used both as the front-tracking flux f^N and as the result of envelope
/// construction. Evaluation outside the breakpoint span (beyond a 1e-12 slack)
/// throws RangeError.
class PiecewiseLinearFlux {
 public:
  PiecewiseLinearFlux(std::vector<double> breakpoints, std::vector<double> values);

  double operator()(double v) const;

  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return slopes_; }
  std::size_t segment_count() const { return slopes_.size(); }
  double lower() const { return x_.front(); }
  double upper() const { return x_.back(); }

  /// Largest absolute segment slope.
  double lipschitz_norm() const { return lipschitz_; }

  /// Index of the segment containing v; breakpoints belong to the segment on
  /// their right except the last one.
  std::size_t segment_of(double v) const;

  /// Slope of the segment adjacent to v on the requested side.
  double derivative(double v, Side side) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slopes_;
  double lipschitz_ = 0.0;
};

/// Lower convex envelope of f restricted to [a, b]; a and b are inserted as
/// interpolated breakpoints. Collinear vertices (slope tolerance 1e-12) are
/// removed, so consecutive slopes of the result are strictly increasing.
PiecewiseLinearFlux convex_envelope(const PiecewiseLinearFlux& f, double a, double b);

/// Upper concave envelope; consecutive slopes strictly decreasing.
PiecewiseLinearFlux concave_envelope(const PiecewiseLinearFlux& f, double a, double b);

/// ||f - g||_Lip over the common domain, computed on the merged breakpoint set.
double lipschitz_distance(const PiecewiseLinearFlux& f, const PiecewiseLinearFlux& g);

/// Particle velocity w as a function of the conserved state.
class VelocityFunction {
 public:
  enum class Kind { LinearTraffic, Table };

  /// w(v) = w_max (1 - v / rho_max).
  static VelocityFunction linear_traffic(double w_max = 1.0, double rho_max = 1.0);
  /// Linear interpolation through (breakpoints, values).
  static VelocityFunction table(std::vector<double> breakpoints, std::vector<double> values);

  double operator()(double v) const;
  double derivative(double v, Side side) const;

  Kind kind() const { return kind_; }
  double w_max() const { return w_max_; }
  double rho_max() const { return rho_max_; }
  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return y_; }

  /// Interior points where the derivative jumps (table kind only).
  std::vector<double> kinks() const;

  double lipschitz_norm() const;
  /// sup |w| over [0, rho_max] (linear kind) or over the table span.
  double sup_norm() const;

  bool strictly_decreasing() const;
  /// Membership in the admissible class: strictly decreasing on [0,1], w(1) = 0
  /// (within 1e-14), finite Lipschitz norm.
  bool in_admissible_class() const;

 private:
  Kind kind_ = Kind::LinearTraffic;
  double w_max_ = 1.0;
  double rho_max_ = 1.0;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slopes_;
};

/// ||w - u||_Lip on [lo, hi].
double lipschitz_distance(const VelocityFunction& w, const VelocityFunction& u, double lo = 0.0,
                          double hi = 1.0);

/// Flux of a scalar conservation law v_t + f(v)_x = 0 on a bounded state domain.
class FluxFunction {
 public:
  enum class Kind { TrafficQuadratic, BurgersQuadratic, PiecewiseLinear, TrafficVelocity };

  /// f(rho) = rho w_max (1 - rho / rho_max) on [0, rho_max].
  static FluxFunction traffic_quadratic(double w_max = 1.0, double rho_max = 1.0);
  /// f(v) = scale v^2 / 2 on [lo, hi].
  static FluxFunction burgers(double scale = 1.0, double lo = -1.0, double hi = 1.0);
  static FluxFunction piecewise_linear(PiecewiseLinearFlux f);
  /// f(rho) = rho w(rho) on [0, 1] (or the table span of w).
  static FluxFunction traffic(VelocityFunction w);

  double operator()(double v) const;
  double derivative(double v, Side side) const;

  Kind kind() const { return kind_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double w_max() const { return w_max_; }
  double rho_max() const { return rho_max_; }
  double scale() const { return scale_; }
  const PiecewiseLinearFlux* as_piecewise_linear() const;
  const VelocityFunction* velocity() const;

  /// Interior points where f' jumps.
  std::vector<double> kinks() const;
  /// Interior points where f' vanishes inside a smooth piece.
  std::vector<double> turning_points() const;

  double lipschitz_norm() const;
  /// Total variation of f on [min(a,b), max(a,b)], i.e. the integral of |f'|.
  double variation(double a, double b) const;

 private:
  Kind kind_ = Kind::TrafficQuadratic;
  double lo_ = 0.0;
  double hi_ = 1.0;
  double w_max_ = 1.0;
  double rho_max_ = 1.0;
  double scale_ = 1.0;
  std::variant<std::monostate, PiecewiseLinearFlux, VelocityFunction> data_;
  // Sorted kinks and turning points; f is monotone between consecutive entries.
  std::vector<double> critical_;

  void check_domain(double v) const;
  void finalize();
};

/// f^N: interpolant of f at lower + j (upper - lower) / 2^N, j = 0..2^N.
PiecewiseLinearFlux piecewise_linearize(const FluxFunction& f, int level);

/// Flux used for front tracking: a piecewise-linear flux is used as given,
/// any other kind is linearised at the given level.
PiecewiseLinearFlux tracking_flux(const FluxFunction& f, int level);

/// ||f - g||_Lip over the common domain. Exact for every supported kind, since
/// f' - g' is affine between consecutive kinks.
double lipschitz_distance(const FluxFunction& f, const FluxFunction& g);

}  // namespace shockline

#endif  // SHOCKLINE_FLUX_HPP_
