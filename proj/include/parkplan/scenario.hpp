// Copyright 2026 The parkplan Authors
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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parkplan/scvx.hpp"
#include "parkplan/stc.hpp"
#include "parkplan/types.hpp"

namespace parkplan
{

/// Box and heading-interval union the start pose is drawn from.
struct StartRegion
{
  Vec2 x_range{0.0, 0.0};
  Vec2 y_range{0.0, 0.0};
  std::vector<Vec2> heading_intervals;  // radians
};

struct Scenario
{
  std::string name;
  CarState p0;
  CarState p1;
  std::vector<Stc> stcs;
  Vec2 y_bounds{0.0, 5.0};
  std::optional<Vec2> x_bounds;
  ModelParams model;
  ScvxParams scvx;
  std::optional<StartRegion> start_region;
};

/// Reverse parking into a 2x2 m gap between two obstacle blocks; start
/// sampled above the blocks with heading in [-60,60] U [150,210] degrees.
Scenario reverse_parking();

/// Parallel parking into a 5 m wide bay beside the driving lane.
Scenario parallel_parking();

/// Deterministic start pose for the scenario's sampling region. Throws if
/// the scenario has no start region.
CarState sample_start(const Scenario & s, uint64_t seed);

struct ViolationReport
{
  double max_stc_residual = 0.0;
  double max_bound_violation = 0.0;
  double boundary_position_error = 0.0;
  double boundary_heading_error = 0.0;
  double continuity_gap = 0.0;
  double control_box_violation = 0.0;
  double dynamics_error = 0.0;  // knot mismatch under dense re-integration
  double path_length = 0.0;
  double duration = 0.0;
  int cusp_count = 0;

  bool clean(double tol) const
  {
    return max_stc_residual <= tol && max_bound_violation <= tol &&
           boundary_position_error <= tol && boundary_heading_error <= tol &&
           continuity_gap <= tol && control_box_violation <= tol && dynamics_error <= tol;
  }
};

/// Densely re-integrates the nonlinear dynamics under the solution controls
/// and checks every scenario constraint along the way, so corner cutting
/// between knots is caught as well.
ViolationReport validate_trajectory(
  const MultiSegmentSolution & traj, const Scenario & s, int n_dense = 20);

/// One dense pose/control sample of a re-integrated trajectory.
struct DenseSample
{
  int segment = 0;
  double tau = 0.0;  // normalized time within the segment
  Vec3 state = Vec3::Zero();
  Vec2 control = Vec2::Zero();
};

/// Nonlinear re-integration of all segments at n_dense points per interval.
std::vector<DenseSample> dense_trajectory(
  const MultiSegmentSolution & traj, const ModelParams & model, int n_dense);

nlohmann::json scenario_to_json(const Scenario & s);
Scenario scenario_from_json(const nlohmann::json & j);

}  // namespace parkplan
