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

#include "shockline/flux.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shockline/error.hpp"

namespace shockline {

namespace {

constexpr double kDomainSlack = 1e-12;
constexpr double kCollinearSlope = 1e-12;

void validate_table(const std::vector<double>& x, const std::vector<double>& y, const char* what) {
  if (x.size() != y.size()) {
    throw PreconditionError(std::string(what) + ": breakpoint/value size mismatch");
  }
  if (x.size() < 2) {
    throw PreconditionError(std::string(what) + ": at least two breakpoints required");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw PreconditionError(std::string(what) + ": non-finite breakpoint or value");
    }
    if (i > 0 && !(x[i] > x[i - 1])) {
      throw PreconditionError(std::string(what) + ": breakpoints must be strictly increasing");
    }
  }
}

double clamp_to_domain(double v, double lo, double hi, const char* what) {
  if (!(v >= lo - kDomainSlack && v <= hi + kDomainSlack)) {
    throw RangeError(std::string(what) + ": state " + std::to_string(v) + " outside [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return std::clamp(v, lo, hi);
}

// Shared evaluation of a linear interpolant; exact at breakpoints.
double interpolate(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& slopes, double v) {
  auto it = std::upper_bound(x.begin(), x.end(), v);
  if (it != x.begin() && *(it - 1) == v) {
    return y[static_cast<std::size_t>(it - x.begin()) - 1];
  }
  std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  i = std::min(i, slopes.size() - 1);
  return y[i] + slopes[i] * (v - x[i]);
}

double one_sided_slope(const std::vector<double>& x, const std::vector<double>& slopes, double v,
                       Side side) {
  auto it = std::lower_bound(x.begin(), x.end(), v);
  std::size_t n = slopes.size();
  if (it != x.end() && *it == v) {
    auto j = static_cast<std::size_t>(it - x.begin());
    if (side == Side::Left) {
      return slopes[j == 0 ? 0 : j - 1];
    }
    return slopes[std::min(j, n - 1)];
  }
  std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  return slopes[std::min(i, n - 1)];
}

std::vector<double> segment_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> s(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    s[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  }
  return s;
}

template <class LeftDerivative, class RightDerivative>
double max_abs_affine_piecewise(std::vector<double> points, LeftDerivative left,
                                RightDerivative right) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    best = std::max(best, std::abs(right(points[i])));
    best = std::max(best, std::abs(left(points[i + 1])));
  }
  return best;
}

std::vector<double> interior(const std::vector<double>& pts, double lo, double hi) {
  std::vector<double> out;
  for (double p : pts) {
    if (p > lo && p < hi) out.push_back(p);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseLinearFlux

PiecewiseLinearFlux::PiecewiseLinearFlux(std::vector<double> breakpoints,
                                         std::vector<double> values)
    : x_(std::move(breakpoints)), y_(std::move(values)) {
  validate_table(x_, y_, "piecewise-linear flux");
  slopes_ = segment_slopes(x_, y_);
  for (double s : slopes_) lipschitz_ = std::max(lipschitz_, std::abs(s));
}

double PiecewiseLinearFlux::operator()(double v) const {
  v = clamp_to_domain(v, lower(), upper(), "piecewise-linear flux");
  return interpolate(x_, y_, slopes_, v);
}

std::size_t PiecewiseLinearFlux::segment_of(double v) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), v);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, slopes_.size() - 1);
}

double PiecewiseLinearFlux::derivative(double v, Side side) const {
  v = clamp_to_domain(v, lower(), upper(), "piecewise-linear flux");
  return one_sided_slope(x_, slopes_, v, side);
}

namespace {

enum class Hull { Lower, Upper };

PiecewiseLinearFlux envelope(const PiecewiseLinearFlux& f, double a, double b, Hull hull) {
  if (!(a < b)) {
    throw PreconditionError("envelope: degenerate interval, need a < b");
  }
  clamp_to_domain(a, f.lower(), f.upper(), "envelope");
  clamp_to_domain(b, f.lower(), f.upper(), "envelope");

  std::vector<double> px{a};
  std::vector<double> py{f(a)};
  const auto& fx = f.breakpoints();
  auto first = std::upper_bound(fx.begin(), fx.end(), a);
  for (auto it = first; it != fx.end() && *it < b; ++it) {
    px.push_back(*it);
    py.push_back(f.values()[static_cast<std::size_t>(it - fx.begin())]);
  }
  px.push_back(b);
  py.push_back(f(b));

  // Monotone chain over points already sorted by state.
  std::vector<std::size_t> h;
  auto slope = [&](std::size_t i, std::size_t j) { return (py[j] - py[i]) / (px[j] - px[i]); };
  for (std::size_t p = 0; p < px.size(); ++p) {
    while (h.size() >= 2) {
      double s_prev = slope(h[h.size() - 2], h.back());
      double s_next = slope(h.back(), p);
      bool drop = hull == Hull::Lower ? s_prev >= s_next - kCollinearSlope
                                      : s_prev <= s_next + kCollinearSlope;
      if (!drop) break;
      h.pop_back();
    }
    h.push_back(p);
  }
  std::vector<double> hx;
  std::vector<double> hy;
  hx.reserve(h.size());
  hy.reserve(h.size());
  for (std::size_t i : h) {
    hx.push_back(px[i]);
    hy.push_back(py[i]);
  }
  return PiecewiseLinearFlux(std::move(hx), std::move(hy));
}

}  // namespace

PiecewiseLinearFlux convex_envelope(const PiecewiseLinearFlux& f, double a, double b) {
  return envelope(f, a, b, Hull::Lower);
}

PiecewiseLinearFlux concave_envelope(const PiecewiseLinearFlux& f, double a, double b) {
  return envelope(f, a, b, Hull::Upper);
}

double lipschitz_distance(const PiecewiseLinearFlux& f, const PiecewiseLinearFlux& g) {
  double lo = std::max(f.lower(), g.lower());
  double hi = std::min(f.upper(), g.upper());
  if (!(lo < hi)) {
    throw PreconditionError("lipschitz_distance: fluxes have disjoint domains");
  }
  std::vector<double> pts{lo, hi};
  for (double x : interior(f.breakpoints(), lo, hi)) pts.push_back(x);
  for (double x : interior(g.breakpoints(), lo, hi)) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double d0 = f(pts[i]) - g(pts[i]);
    double d1 = f(pts[i + 1]) - g(pts[i + 1]);
    best = std::max(best, std::abs((d1 - d0) / (pts[i + 1] - pts[i])));
  }
  return best;
}

// ---------------------------------------------------------------------------
// VelocityFunction

VelocityFunction VelocityFunction::linear_traffic(double w_max, double rho_max) {
  if (!(rho_max > 0.0) || !std::isfinite(w_max)) {
    throw PreconditionError("linear traffic velocity: need rho_max > 0 and finite w_max");
  }
  VelocityFunction w;
  w.kind_ = Kind::LinearTraffic;
  w.w_max_ = w_max;
  w.rho_max_ = rho_max;
  return w;
}

VelocityFunction VelocityFunction::table(std::vector<double> breakpoints,
                                         std::vector<double> values) {
  validate_table(breakpoints, values, "velocity table");
  VelocityFunction w;
  w.kind_ = Kind::Table;
  w.x_ = std::move(breakpoints);
  w.y_ = std::move(values);
  w.slopes_ = segment_slopes(w.x_, w.y_);
  w.rho_max_ = w.x_.back();
  w.w_max_ = *std::max_element(w.y_.begin(), w.y_.end());
  return w;
}

double VelocityFunction::operator()(double v) const {
  if (kind_ == Kind::LinearTraffic) {
    return w_max_ * (1.0 - v / rho_max_);
  }
  v = clamp_to_domain(v, x_.front(), x_.back(), "velocity table");
  return interpolate(x_, y_, slopes_, v);
}

double VelocityFunction::derivative(double v, Side side) const {
  if (kind_ == Kind::LinearTraffic) {
    return -w_max_ / rho_max_;
  }
  v = clamp_to_domain(v, x_.front(), x_.back(), "velocity table");
  return one_sided_slope(x_, slopes_, v, side);
}

std::vector<double> VelocityFunction::kinks() const {
  if (kind_ == Kind::LinearTraffic || x_.size() <= 2) return {};
  return std::vector<double>(x_.begin() + 1, x_.end() - 1);
}

double VelocityFunction::lipschitz_norm() const {
  if (kind_ == Kind::LinearTraffic) return std::abs(w_max_ / rho_max_);
  double best = 0.0;
  for (double s : slopes_) best = std::max(best, std::abs(s));
  return best;
}

double VelocityFunction::sup_norm() const {
  if (kind_ == Kind::LinearTraffic) return std::abs(w_max_);
  double best = 0.0;
  for (double y : y_) best = std::max(best, std::abs(y));
  return best;
}

bool VelocityFunction::strictly_decreasing() const {
  if (kind_ == Kind::LinearTraffic) return w_max_ > 0.0;
  for (double s : slopes_) {
    if (!(s < 0.0)) return false;
  }
  return true;
}

bool VelocityFunction::in_admissible_class() const {
  if (!strictly_decreasing() || !std::isfinite(lipschitz_norm())) return false;
  if (kind_ == Kind::LinearTraffic) return rho_max_ == 1.0;
  if (x_.front() > 0.0 || x_.back() < 1.0) return false;
  return std::abs((*this)(1.0)) <= 1e-14;
}

double lipschitz_distance(const VelocityFunction& w, const VelocityFunction& u, double lo,
                          double hi) {
  if (!(lo < hi)) throw PreconditionError("lipschitz_distance: need lo < hi");
  std::vector<double> pts{lo, hi};
  for (double x : interior(w.kinks(), lo, hi)) pts.push_back(x);
  for (double x : interior(u.kinks(), lo, hi)) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double d0 = w(pts[i]) - u(pts[i]);
    double d1 = w(pts[i + 1]) - u(pts[i + 1]);
    best = std::max(best, std::abs((d1 - d0) / (pts[i + 1] - pts[i])));
  }
  return best;
}

// ---------------------------------------------------------------------------
// FluxFunction

FluxFunction FluxFunction::traffic_quadratic(double w_max, double rho_max) {
  if (!(rho_max > 0.0) || !std::isfinite(w_max)) {
    throw PreconditionError("traffic flux: need rho_max > 0 and finite w_max");
  }
  FluxFunction f;
  f.kind_ = Kind::TrafficQuadratic;
  f.lo_ = 0.0;
  f.hi_ = rho_max;
  f.w_max_ = w_max;
  f.rho_max_ = rho_max;
  f.finalize();
  return f;
}

FluxFunction FluxFunction::burgers(double scale, double lo, double hi) {
  if (!(lo < hi)) throw PreconditionError("burgers flux: need lo < hi");
  FluxFunction f;
  f.kind_ = Kind::BurgersQuadratic;
  f.lo_ = lo;
  f.hi_ = hi;
  f.scale_ = scale;
  f.finalize();
  return f;
}

FluxFunction FluxFunction::piecewise_linear(PiecewiseLinearFlux pl) {
  FluxFunction f;
  f.kind_ = Kind::PiecewiseLinear;
  f.lo_ = pl.lower();
  f.hi_ = pl.upper();
  f.data_ = std::move(pl);
  f.finalize();
  return f;
}

FluxFunction FluxFunction::traffic(VelocityFunction w) {
  FluxFunction f;
  f.kind_ = Kind::TrafficVelocity;
  if (w.kind() == VelocityFunction::Kind::LinearTraffic) {
    f.lo_ = 0.0;
    f.hi_ = w.rho_max();
  } else {
    f.lo_ = w.breakpoints().front();
    f.hi_ = w.breakpoints().back();
  }
  f.w_max_ = w.w_max();
  f.rho_max_ = w.rho_max();
  f.data_ = std::move(w);
  f.finalize();
  return f;
}

const PiecewiseLinearFlux* FluxFunction::as_piecewise_linear() const {
  return std::get_if<PiecewiseLinearFlux>(&data_);
}

const VelocityFunction* FluxFunction::velocity() const {
  return std::get_if<VelocityFunction>(&data_);
}

void FluxFunction::check_domain(double v) const { clamp_to_domain(v, lo_, hi_, "flux"); }

void FluxFunction::finalize() {
  critical_ = kinks();
  for (double p : turning_points()) critical_.push_back(p);
  std::sort(critical_.begin(), critical_.end());
  critical_.erase(std::unique(critical_.begin(), critical_.end()), critical_.end());
}

double FluxFunction::operator()(double v) const {
  check_domain(v);
  v = std::clamp(v, lo_, hi_);
  switch (kind_) {
    case Kind::TrafficQuadratic:
      return v * w_max_ * (1.0 - v / rho_max_);
    case Kind::BurgersQuadratic:
      return scale_ * v * v / 2.0;
    case Kind::PiecewiseLinear:
      return std::get<PiecewiseLinearFlux>(data_)(v);
    case Kind::TrafficVelocity:
      return v * std::get<VelocityFunction>(data_)(v);
  }
  return 0.0;
}

double FluxFunction::derivative(double v, Side side) const {
  check_domain(v);
  v = std::clamp(v, lo_, hi_);
  switch (kind_) {
    case Kind::TrafficQuadratic:
      return w_max_ * (1.0 - 2.0 * v / rho_max_);
    case Kind::BurgersQuadratic:
      return scale_ * v;
    case Kind::PiecewiseLinear:
      return std::get<PiecewiseLinearFlux>(data_).derivative(v, side);
    case Kind::TrafficVelocity: {
      const auto& w = std::get<VelocityFunction>(data_);
      return w(v) + v * w.derivative(v, side);
    }
  }
  return 0.0;
}

std::vector<double> FluxFunction::kinks() const {
  if (kind_ == Kind::PiecewiseLinear) {
    return interior(std::get<PiecewiseLinearFlux>(data_).breakpoints(), lo_, hi_);
  }
  if (kind_ == Kind::TrafficVelocity) {
    return interior(std::get<VelocityFunction>(data_).kinks(), lo_, hi_);
  }
  return {};
}

std::vector<double> FluxFunction::turning_points() const {
  std::vector<double> out;
  switch (kind_) {
    case Kind::TrafficQuadratic:
      if (w_max_ != 0.0) out.push_back(rho_max_ / 2.0);
      break;
    case Kind::BurgersQuadratic:
      if (scale_ != 0.0) out.push_back(0.0);
      break;
    case Kind::PiecewiseLinear:
      break;
    case Kind::TrafficVelocity: {
      const auto& w = std::get<VelocityFunction>(data_);
      if (w.kind() == VelocityFunction::Kind::LinearTraffic) {
        if (w.w_max() != 0.0) out.push_back(w.rho_max() / 2.0);
        break;
      }
      const auto& x = w.breakpoints();
      const auto& y = w.values();
      for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        double m = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if (m == 0.0) continue;
        // d/drho [rho (y_i + m (rho - x_i))] = y_i - m x_i + 2 m rho
        double r = (m * x[i] - y[i]) / (2.0 * m);
        if (r > x[i] && r < x[i + 1]) out.push_back(r);
      }
      break;
    }
  }
  return interior(out, lo_, hi_);
}

double FluxFunction::lipschitz_norm() const {
  if (kind_ == Kind::PiecewiseLinear) {
    return std::get<PiecewiseLinearFlux>(data_).lipschitz_norm();
  }
  std::vector<double> pts = kinks();
  pts.push_back(lo_);
  pts.push_back(hi_);
  return max_abs_affine_piecewise(
      std::move(pts), [&](double v) { return derivative(v, Side::Left); },
      [&](double v) { return derivative(v, Side::Right); });
}

double FluxFunction::variation(double a, double b) const {
  if (a > b) std::swap(a, b);
  check_domain(a);
  check_domain(b);
  if (a == b) return 0.0;
  auto it = std::upper_bound(critical_.begin(), critical_.end(), a);
  double total = 0.0;
  double fx = (*this)(a);
  for (; it != critical_.end() && *it < b; ++it) {
    double fc = (*this)(*it);
    total += std::abs(fc - fx);
    fx = fc;
  }
  total += std::abs((*this)(b) - fx);
  return total;
}

PiecewiseLinearFlux piecewise_linearize(const FluxFunction& f, int level) {
  if (level < 1 || level > 24) {
    throw PreconditionError("piecewise_linearize: level must be in [1, 24]");
  }
  const std::size_t cells = std::size_t{1} << level;
  const double lo = f.lower();
  const double hi = f.upper();
  std::vector<double> x(cells + 1);
  std::vector<double> y(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) {
    x[j] = j == cells ? hi : lo + (hi - lo) * std::ldexp(static_cast<double>(j), -level);
    y[j] = f(x[j]);
  }
  return PiecewiseLinearFlux(std::move(x), std::move(y));
}

PiecewiseLinearFlux tracking_flux(const FluxFunction& f, int level) {
  if (const auto* pl = f.as_piecewise_linear()) return *pl;
  return piecewise_linearize(f, level);
}

double lipschitz_distance(const FluxFunction& f, const FluxFunction& g) {
  double lo = std::max(f.lower(), g.lower());
  double hi = std::min(f.upper(), g.upper());
  if (!(lo < hi)) throw PreconditionError("lipschitz_distance: fluxes have disjoint domains");
  std::vector<double> pts{lo, hi};
  for (double x : interior(f.kinks(), lo, hi)) pts.push_back(x);
  for (double x : interior(g.kinks(), lo, hi)) pts.push_back(x);
  return max_abs_affine_piecewise(
      std::move(pts),
      [&](double v) { return f.derivative(v, Side::Left) - g.derivative(v, Side::Left); },
      [&](double v) { return f.derivative(v, Side::Right) - g.derivative(v, Side::Right); });
}

}  // namespace shockline
