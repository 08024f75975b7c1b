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

#include "shockline/step_function.hpp"

#include <algorithm>
#include <cmath>

#include "shockline/error.hpp"

namespace shockline {

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw PreconditionError("step function: need exactly one more value than breakpoints");
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i])) {
      throw PreconditionError("step function: non-finite breakpoint");
    }
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw PreconditionError("step function: breakpoints must be strictly increasing");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw PreconditionError("step function: non-finite value");
  }
  values_.push_back(values.front());
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (values[i + 1] == values_.back()) continue;
    x_.push_back(breakpoints[i]);
    values_.push_back(values[i + 1]);
  }
}

StepFunction StepFunction::constant(double c) { return StepFunction({}, {c}); }

double StepFunction::operator()(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return values_[static_cast<std::size_t>(it - x_.begin())];
}

std::pair<double, double> StepFunction::limits(double x, double tol) const {
  auto lo = std::lower_bound(x_.begin(), x_.end(), x - tol);
  auto hi = std::upper_bound(x_.begin(), x_.end(), x + tol);
  auto i = static_cast<std::size_t>(lo - x_.begin());
  auto j = static_cast<std::size_t>(hi - x_.begin());
  return {values_[i], values_[j]};
}

double StepFunction::total_variation() const {
  double tv = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i) tv += std::abs(values_[i] - values_[i - 1]);
  return tv;
}

double StepFunction::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double StepFunction::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double StepFunction::integral(double a, double b) const {
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  double total = 0.0;
  double cursor = a;
  auto it = std::upper_bound(x_.begin(), x_.end(), a);
  auto idx = static_cast<std::size_t>(it - x_.begin());
  while (idx < x_.size() && x_[idx] < b) {
    total += values_[idx] * (x_[idx] - cursor);
    cursor = x_[idx];
    ++idx;
  }
  total += values_[idx] * (b - cursor);
  return sign * total;
}

StepFunction StepFunction::map_values(const std::function<double(double)>& fn) const {
  std::vector<double> v;
  v.reserve(values_.size());
  for (double c : values_) v.push_back(fn(c));
  return StepFunction(x_, std::move(v));
}

StepFunction combine(const StepFunction& a, const StepFunction& b,
                     const std::function<double(double, double)>& op) {
  std::vector<double> xs;
  xs.reserve(a.breakpoints().size() + b.breakpoints().size());
  std::merge(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(),
             b.breakpoints().end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> vals;
  vals.reserve(xs.size() + 1);
  vals.push_back(op(a.left_far(), b.left_far()));
  for (double x : xs) vals.push_back(op(a(x), b(x)));
  return StepFunction(std::move(xs), std::move(vals));
}

double l1_distance(const StepFunction& a, const StepFunction& b, double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi))) {
    throw PreconditionError("l1_distance: window must be finite");
  }
  StepFunction d = combine(a, b, [](double p, double q) { return std::abs(p - q); });
  return std::abs(d.integral(lo, hi));
}

double linf_distance(const StepFunction& a, const StepFunction& b, double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  StepFunction d = combine(a, b, [](double p, double q) { return std::abs(p - q); });
  double best = d(lo);
  for (double x : d.breakpoints()) {
    if (x > lo && x < hi) best = std::max(best, d(x));
  }
  return best;
}

StepFunction quantize_floor(const StepFunction& v, int level, double lo, double hi) {
  if (level < 0 || level > 40 || !(lo < hi)) {
    throw PreconditionError("quantize_floor: invalid level or range");
  }
  const double cells = std::ldexp(1.0, level);
  return v.map_values([&](double c) {
    double j = std::floor((c - lo) / (hi - lo) * cells);
    j = std::clamp(j, 0.0, cells);
    return lo + (hi - lo) * (j / cells);
  });
}

}  // namespace shockline
