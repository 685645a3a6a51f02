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

#include <array>
#include <string>
#include <vector>

#include "parkplan/conic.hpp"
#include "parkplan/discretization.hpp"
#include "parkplan/types.hpp"

namespace parkplan
{

struct Scenario;

inline constexpr int kNumSegments = 3;

struct CostWeights
{
  double sigma = 1.0;
  double nu = 1e5;
  double jerk = 0.1;
  double length = 0.0;
};

struct TrustRegionParams
{
  double initial = 1.0;
  double rho0 = 0.0;
  double rho1 = 0.25;
  double rho2 = 0.7;
  double alpha_shrink = 2.0;
  double alpha_grow = 2.0;
  double min_radius = 1e-6;
  double max_radius = 16.0;
};

struct ScvxParams
{
  int K = 20;
  int max_iters = 50;
  CostWeights weights;
  TrustRegionParams trust;
  double eps_step = 1e-4;
  double eps_nu = 1e-4;
  double sigma_min = 0.1;
  double sigma_max = 60.0;
  bool steering_joint_continuity = false;
  DiscretizationOptions discretization;
};

struct IterationRecord
{
  int iteration = 0;
  double cost_total = 0.0;
  double cost_sigma = 0.0;
  double cost_jerk = 0.0;
  double cost_length = 0.0;
  double nu_norm1 = 0.0;         // subproblem virtual control, scaled l1
  double stc_slack_norm1 = 0.0;  // subproblem trigger-constraint slack
  double trust_radius = 0.0;     // radius the subproblem was solved with
  double predicted_decrease = 0.0;
  double actual_decrease = 0.0;
  double ratio = 0.0;
  bool accepted = false;
  double step_norm = 0.0;  // max per-knot scaled l1 step
  double sigma_total = 0.0;
};

struct MultiSegmentSolution
{
  std::array<SegmentTrajectory, kNumSegments> segments;
  std::array<std::vector<Vec3>, kNumSegments> virtual_controls;  // scaled, per interval
  int iterations = 0;
  bool converged = false;
  std::string failure_reason;  // nonempty when the backend aborted the loop
  std::vector<IterationRecord> history;
  CarState goal_used;  // goal pose with the heading unwrapped toward the start
};

/// Splits the straight line from p0 to p1 into three equal-parameter pieces,
/// interpolating all state components; controls start at zero.
std::array<SegmentTrajectory, kNumSegments> initialize_segments(
  const CarState & p0, const CarState & p1, const ScvxParams & params);

/// Rebases the goal heading onto the 2*pi branch nearest the start heading,
/// keeping interpolation and boundary errors free of wrap artifacts.
CarState unwrap_goal_heading(const CarState & p0, const CarState & p1);

struct TrustRegionDecision
{
  bool accept = false;
  double new_radius = 0.0;
};

/// Ratio test on predicted vs actual decrease of the penalized cost.
/// Nonpositive predicted decrease rejects and shrinks.
TrustRegionDecision trust_region_update(
  double predicted_decrease, double actual_decrease, double radius,
  const TrustRegionParams & params);

/// Index layout of one assembled subproblem, for extracting the solution.
struct SubproblemLayout
{
  int K = 0;
  std::array<int, kNumSegments> x_start{};
  std::array<int, kNumSegments> u_start{};
  std::array<int, kNumSegments> sigma_index{};
  std::array<int, kNumSegments> nu_start{};
  int core_count = 0;   // variables before any epigraph/slack blocks
  int total_count = 0;  // all variables

  int x(int seg, int k, int j) const { return x_start[seg] + 3 * k + j; }
  int u(int seg, int k, int j) const { return u_start[seg] + 2 * k + j; }
  int nu(int seg, int k, int j) const { return nu_start[seg] + 3 * k + j; }
  std::vector<int> stc_slacks;  // indices of all trigger-constraint slacks
};

struct Subproblem
{
  conic::ConicProblem problem;
  SubproblemLayout layout;
};

/// Assembles the convex subproblem around the reference trajectories in
/// scaled variables: linearized dynamics with virtual control, boundary and
/// continuity equalities, speed joints, control box, scenario bounds,
/// softened trigger constraints and the per-knot hard trust region.
Subproblem build_subproblem(
  const std::array<SegmentTrajectory, kNumSegments> & ref,
  const std::array<LtvSystem, kNumSegments> & ltv, const Scenario & scenario,
  double trust_radius, const ScalingTransform & scaling, const ScvxParams & params);

/// Full successive-convexification loop for one scenario instance.
MultiSegmentSolution scvx_run(const Scenario & scenario, const ScvxParams & params);

/// Scaling box used by scvx_run, derived from scenario bounds and the
/// instance boundary poses.
Bounds scaling_bounds(const Scenario & scenario, const CarState & p0, const CarState & p1);

}  // namespace parkplan
