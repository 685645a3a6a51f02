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

#include <utility>
#include <vector>

#include "parkplan/types.hpp"
#include "parkplan/vehicle_model.hpp"

namespace parkplan
{

/// Discrete linear time-varying system over the knot grid:
///   x_{k+1} = A_k x_k + Bm_k u_k + Bp_k u_{k+1} + S_k sigma + w_k
/// with one entry per interval k in [0, K-2].
struct LtvSystem
{
  int K = 0;
  std::vector<Mat3> A;
  std::vector<Mat32> B_minus;
  std::vector<Mat32> B_plus;
  std::vector<Vec3> S;
  std::vector<Vec3> w;
};

/// First-order-hold interpolation weights on [tau_k, tau_k1]; they sum to 1.
/// Throws on a degenerate interval.
std::pair<double, double> foh_coefficients(double tau, double tau_k, double tau_k1);

struct DiscretizationOptions
{
  int rk4_substeps = 16;
};

/// Integrates the fundamental-matrix ODE jointly with the input/defect
/// integrands over each interval of the reference trajectory. The reference
/// state is re-integrated from each knot under FOH-interpolated reference
/// controls. Throws std::runtime_error with the interval index if the
/// integration produces non-finite values.
LtvSystem discretize_foh(
  const SegmentTrajectory & ref_traj, const DynamicsModel & model,
  const DiscretizationOptions & opts = {});

/// Componentwise affine map between physical and scaled ([-1, 1]) variables:
/// physical = D * scaled + C with D diagonal positive.
struct ScalingTransform
{
  Vec3 x_scale;
  Vec3 x_offset;
  Vec2 u_scale;
  Vec2 u_offset;
  double sigma_scale = 1.0;
  double sigma_offset = 0.0;

  Vec3 scale_state(const Vec3 & x) const { return (x - x_offset).cwiseQuotient(x_scale); }
  Vec3 unscale_state(const Vec3 & x_hat) const { return x_scale.cwiseProduct(x_hat) + x_offset; }
  Vec2 scale_control(const Vec2 & u) const { return (u - u_offset).cwiseQuotient(u_scale); }
  Vec2 unscale_control(const Vec2 & u_hat) const
  {
    return u_scale.cwiseProduct(u_hat) + u_offset;
  }
  double scale_sigma(double s) const { return (s - sigma_offset) / sigma_scale; }
  double unscale_sigma(double s_hat) const { return sigma_scale * s_hat + sigma_offset; }
};

struct Bounds
{
  Vec3 x_min;
  Vec3 x_max;
  Vec2 u_min;
  Vec2 u_max;
  double sigma_min = 0.0;
  double sigma_max = 1.0;
};

/// Builds the affine maps sending [min, max] to [-1, 1] componentwise.
/// Throws on zero-width ranges.
ScalingTransform make_scaling(const Bounds & bounds);

/// Conjugates the discrete system into scaled variables, absorbing the
/// centering offsets into the defect vectors:
///   x_hat_{k+1} = A^ x_hat_k + Bm^ u_hat_k + Bp^ u_hat_{k+1} + S^ sg_hat + w^
LtvSystem apply_scaling(const ScalingTransform & t, const LtvSystem & sys);

}  // namespace parkplan
