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

#include "parkplan/vehicle_model.hpp"

#include <cmath>

namespace parkplan
{

Vec3 dynamics(const CarState & x, const CarControl & u, double sigma, const ModelParams & p)
{
  return sigma * Vec3{std::cos(x.theta) * u.u1, std::sin(x.theta) * u.u1, p.kappa_max * u.u2};
}

LinearizedDynamics jacobians(const LinearizationPoint & z, const ModelParams & p)
{
  const double c = std::cos(z.x_bar.theta);
  const double s = std::sin(z.x_bar.theta);
  const double sigma = z.sigma_bar;

  LinearizedDynamics lin;
  lin.A.setZero();
  lin.A(0, 2) = -sigma * s * z.u_bar.u1;
  lin.A(1, 2) = sigma * c * z.u_bar.u1;

  lin.B.setZero();
  lin.B(0, 0) = sigma * c;
  lin.B(1, 0) = sigma * s;
  lin.B(2, 1) = sigma * p.kappa_max;

  lin.S = dynamics(z.x_bar, z.u_bar, 1.0, p);
  lin.w = -lin.A * z.x_bar.as_vector() - lin.B * z.u_bar.as_vector();
  return lin;
}

}  // namespace parkplan
