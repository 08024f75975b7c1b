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

#ifndef SHOCKLINE_STEP_FUNCTION_HPP_
#define SHOCKLINE_STEP_FUNCTION_HPP_

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace shockline {

/// Piecewise-constant function on the real line.
///
/// values[0] holds on (-inf, x_1), values[i] on [x_i, x_{i+1}) and values[k]
/// on [x_k, inf). Adjacent equal values are merged on construction, so every
/// stored breakpoint is a genuine jump.
class StepFunction {
 public:
  StepFunction() : values_{0.0} {}
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  static StepFunction constant(double c);

  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t jump_count() const { return x_.size(); }
  double left_far() const { return values_.front(); }
  double right_far() const { return values_.back(); }

  /// Right-continuous point value.
  double operator()(double x) const;
  /// (v(x-), v(x+)); a breakpoint within tol of x counts as located at x.
  std::pair<double, double> limits(double x, double tol = 0.0) const;

  double total_variation() const;
  double min_value() const;
  double max_value() const;

  /// Exact integral over [a, b].
  double integral(double a, double b) const;

  StepFunction map_values(const std::function<double(double)>& fn) const;

 private:
  std::vector<double> x_;
  std::vector<double> values_;
};

/// Exact integral of |a - b| over [lo, hi].
double l1_distance(const StepFunction& a, const StepFunction& b, double lo, double hi);
/// sup |a - b| over [lo, hi].
double linf_distance(const StepFunction& a, const StepFunction& b, double lo, double hi);

/// Pointwise combination op(a(x), b(x)) on the merged breakpoint set.
StepFunction combine(const StepFunction& a, const StepFunction& b,
                     const std::function<double(double, double)>& op);

/// Floors every value onto the grid lo + j (hi - lo) / 2^level. Values already
/// on the grid are left unchanged.
StepFunction quantize_floor(const StepFunction& v, int level, double lo = 0.0, double hi = 1.0);

}  // namespace shockline

#endif  // SHOCKLINE_STEP_FUNCTION_HPP_
