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

#include <vector>

#include <Eigen/Core>

namespace parkplan
{

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Planar configuration of the car (rear-axle center). The heading is kept
/// unwrapped so interpolation between knots stays continuous.
struct CarState
{
  double x_w = 0.0;
  double y_w = 0.0;
  double theta = 0.0;

  Vec3 as_vector() const { return {x_w, y_w, theta}; }
  static CarState from_vector(const Vec3 & v) { return {v(0), v(1), v(2)}; }
};

/// Normalized controls: longitudinal speed and steering, both in [-1, 1].
struct CarControl
{
  double u1 = 0.0;
  double u2 = 0.0;

  Vec2 as_vector() const { return {u1, u2}; }
  static CarControl from_vector(const Vec2 & v) { return {v(0), v(1)}; }
};

struct ModelParams
{
  double kappa_max = 1.0;  // maximum curvature 1/R [1/m]
};

struct LinearizationPoint
{
  double sigma_bar = 1.0;
  CarState x_bar;
  CarControl u_bar;
};

/// One curve section: K knot points of states and controls on the uniform
/// normalized-time grid tau_k = k/(K-1), plus the section time dilation.
struct SegmentTrajectory
{
  int K = 0;
  std::vector<CarState> states;
  std::vector<CarControl> controls;
  double sigma = 1.0;
};

}  // namespace parkplan
