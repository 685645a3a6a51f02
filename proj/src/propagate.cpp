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

#include "parkplan/propagate.hpp"

#include <algorithm>

namespace parkplan
{

Vec3 propagate_interval(
  const DynamicsModel & model, const Vec3 & x_k, const Vec2 & u_k, const Vec2 & u_k1,
  double sigma, double dtau, int substeps)
{
  const int n = std::max(1, substeps);
  const double h = dtau / n;
  Vec3 x = x_k;
  for (int i = 0; i < n; ++i) {
    const double t0 = i * h;
    auto u_at = [&](double t) -> Vec2 {
      const double lp = t / dtau;
      return (1.0 - lp) * u_k + lp * u_k1;
    };
    const Vec3 k1 = model.derivative(x, u_at(t0), sigma);
    const Vec3 k2 = model.derivative(x + 0.5 * h * k1, u_at(t0 + 0.5 * h), sigma);
    const Vec3 k3 = model.derivative(x + 0.5 * h * k2, u_at(t0 + 0.5 * h), sigma);
    const Vec3 k4 = model.derivative(x + h * k3, u_at(t0 + h), sigma);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace parkplan
