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

// Scenario JSON parsing and result serialization.
#ifndef SHOCKLINE_IO_HPP_
#define SHOCKLINE_IO_HPP_

#include <json.hpp>

#include <string>
#include <vector>

#include "shockline/bayes.hpp"
#include "shockline/experiments.hpp"
#include "shockline/flux.hpp"
#include "shockline/front_tracking.hpp"
#include "shockline/step_function.hpp"
#include "shockline/trajectory.hpp"
#include "shockline/viscous.hpp"

namespace shockline::io {

using nlohmann::json;

/// All parsers throw ConfigError naming the offending key. Observation sets
/// are checked for layout only; samplers check the noise level.
VelocityFunction parse_velocity(const json& j);
/// "traffic-velocity" builds rho w(rho) from the scenario velocity.
FluxFunction parse_flux(const json& j, const VelocityFunction& w);
StepFunction parse_step(const json& j);
PriorSpec parse_prior(const json& j);
ObservationSet parse_observations(const json& j);

json to_json(const StepFunction& v);
json to_json(const ObservationSet& obs);
json to_json(const RateReport& r);
/// Fronts and events of a solution.
json event_log(const FrontTrackingSolution& sol);

/// %.17g, with inf and nan spelled out.
std::string format_number(double x);

/// Rows "t,x_break,value": one row with x_break = -inf for the left far field,
/// then one per jump carrying the value to its right.
std::string slices_csv(const std::vector<double>& times, const std::vector<StepFunction>& slices);
/// Inverse of slices_csv.
std::vector<std::pair<double, StepFunction>> parse_slices_csv(const std::string& text);

std::string trajectory_csv(const Trajectory& z);
std::string rate_csv(const RateReport& r);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace shockline::io

#endif  // SHOCKLINE_IO_HPP_
