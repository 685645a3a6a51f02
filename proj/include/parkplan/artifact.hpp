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

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parkplan/scenario.hpp"
#include "parkplan/scvx.hpp"
#include "parkplan/types.hpp"

namespace parkplan
{

/// Everything one planning run produced; plots are regenerated from this
/// snapshot alone, never from solver internals.
struct RunArtifact
{
  int schema_version = 1;
  uint64_t seed = 0;
  nlohmann::json scenario;  // instance snapshot (start pose substituted)
  CarState goal_used;
  bool converged = false;
  int iterations = 0;
  std::string failure_reason;
  std::array<SegmentTrajectory, kNumSegments> segments;
  std::vector<DenseSample> dense;
  std::vector<CarState> rs_samples;
  double rs_length = 0.0;    // meters
  double scvx_length = 0.0;  // meters
  ViolationReport report;
  std::vector<IterationRecord> history;
};

nlohmann::json artifact_to_json(const RunArtifact & a);
RunArtifact artifact_from_json(const nlohmann::json & j);

/// Knot table: segment, k, tau, x_w, y_w, theta, u1, u2.
void write_knots_csv(std::ostream & out, const std::array<SegmentTrajectory, kNumSegments> & segs);

/// Scene plot: color-coded curve sections, hatched obstacle blocks, dashed
/// baseline curve, start/goal markers and heading ticks.
std::string plot_trajectory_svg(const RunArtifact & a);

/// Convergence plot: penalized cost, virtual-control norm (log10) and trust
/// radius per iteration, with accepted steps marked.
std::string plot_history_svg(const std::vector<IterationRecord> & history);

/// History export as JSON lines, one record per iteration.
void write_history_jsonl(std::ostream & out, const std::vector<IterationRecord> & history);

nlohmann::json iteration_record_to_json(const IterationRecord & r);
IterationRecord iteration_record_from_json(const nlohmann::json & j);

}  // namespace parkplan
