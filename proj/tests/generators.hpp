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

// Hand-rolled random generators for property tests.
#ifndef SHOCKLINE_TESTS_GENERATORS_HPP_
#define SHOCKLINE_TESTS_GENERATORS_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "shockline/flux.hpp"
#include "shockline/step_function.hpp"

namespace shockline::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Value on the dyadic grid lo + j (hi - lo) / 2^level with j in [j_lo, j_hi].
inline double dyadic(std::mt19937_64& rng, int level, int j_lo, int j_hi, double lo = 0.0,
                     double hi = 1.0) {
  int j = uniform_int(rng, j_lo, j_hi);
  return lo + (hi - lo) * std::ldexp(static_cast<double>(j), -level);
}

/// Random step function with up to max_jumps jumps in [x_lo, x_hi] and dyadic
/// values at the given level in [lo + j_lo h, lo + j_hi h].
inline StepFunction random_step(std::mt19937_64& rng, int max_jumps, int level, int j_lo,
                                int j_hi, double x_lo = -1.0, double x_hi = 1.0,
                                double lo = 0.0, double hi = 1.0) {
  int k = uniform_int(rng, 1, max_jumps);
  std::vector<double> xs;
  while (static_cast<int>(xs.size()) < k) {
    double x = uniform(rng, x_lo, x_hi);
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> vs;
  for (int i = 0; i <= k; ++i) vs.push_back(dyadic(rng, level, j_lo, j_hi, lo, hi));
  return StepFunction(xs, vs);
}

/// Random continuous piecewise-linear function on [0, 1].
inline PiecewiseLinearFlux random_pl(std::mt19937_64& rng, int pieces) {
  std::vector<double> xs{0.0};
  for (int i = 1; i < pieces; ++i) xs.push_back(static_cast<double>(i) / pieces);
  xs.push_back(1.0);
  std::vector<double> ys;
  for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(uniform(rng, -1.0, 1.0));
  return PiecewiseLinearFlux(xs, ys);
}

}  // namespace shockline::testing

#endif  // SHOCKLINE_TESTS_GENERATORS_HPP_
