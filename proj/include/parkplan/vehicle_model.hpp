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

#include "parkplan/types.hpp"

namespace parkplan
{

/// First-order Taylor data of the time-dilated dynamics at one point:
/// F(x, u, sigma) ~= A x + B u + S sigma + w.
struct LinearizedDynamics
{
  Mat3 A;
  Mat32 B;
  Vec3 S;
  Vec3 w;
};

/// Time-dilated kinematic car derivative with respect to normalized time:
/// sigma * (cos(theta) u1, sin(theta) u1, kappa_max u2).
Vec3 dynamics(const CarState & x, const CarControl & u, double sigma, const ModelParams & p);

/// Analytic Jacobians of the time-dilated dynamics at the expansion point.
/// The defect term w = -A x_bar - B u_bar makes the expansion exact there.
LinearizedDynamics jacobians(const LinearizationPoint & z, const ModelParams & p);

/// Model interface used by the discretizer so tests can substitute frozen
/// linear systems for the car.
class DynamicsModel
{
public:
  virtual ~DynamicsModel() = default;
  virtual Vec3 derivative(const Vec3 & x, const Vec2 & u, double sigma) const = 0;
  virtual LinearizedDynamics linearize(const Vec3 & x, const Vec2 & u, double sigma) const = 0;
};

class CarModel : public DynamicsModel
{
public:
  explicit CarModel(const ModelParams & params) : params_(params) {}

  Vec3 derivative(const Vec3 & x, const Vec2 & u, double sigma) const override
  {
    return dynamics(CarState::from_vector(x), CarControl::from_vector(u), sigma, params_);
  }

  LinearizedDynamics linearize(const Vec3 & x, const Vec2 & u, double sigma) const override
  {
    return jacobians({sigma, CarState::from_vector(x), CarControl::from_vector(u)}, params_);
  }

  const ModelParams & params() const { return params_; }

private:
  ModelParams params_;
};

}  // namespace parkplan
