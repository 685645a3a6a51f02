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
#include "parkplan/vehicle_model.hpp"

namespace parkplan
{

/// RK4 propagation of the nonlinear dynamics over one knot interval with
/// first-order-hold controls.
Vec3 propagate_interval(
  const DynamicsModel & model, const Vec3 & x_k, const Vec2 & u_k, const Vec2 & u_k1,
  double sigma, double dtau, int substeps);

}  // namespace parkplan
