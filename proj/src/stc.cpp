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

#include "parkplan/stc.hpp"

#include <algorithm>
#include <stdexcept>

namespace parkplan
{

double eta_star(double g_value)
{
  return -std::min(g_value, 0.0);
}

double trigger_value(const Stc & s, const Vec3 & z)
{
  if (s.triggers.empty()) {
    throw std::invalid_argument("stc: needs at least one trigger");
  }
  double g = s.triggers.front()(z);
  for (size_t i = 1; i < s.triggers.size(); ++i) {
    g = std::min(g, s.triggers[i](z));
  }
  return g;
}

double residual(const Stc & s, const Vec3 & z)
{
  return eta_star(trigger_value(s, z)) * s.constraint(z);
}

LinearizedStc linearize(const Stc & s, const Vec3 & z_bar)
{
  if (s.triggers.empty()) {
    throw std::invalid_argument("stc: needs at least one trigger");
  }
  // Active trigger: argmin over the OR composition, ties toward the first.
  size_t active = 0;
  double g = s.triggers.front()(z_bar);
  for (size_t i = 1; i < s.triggers.size(); ++i) {
    const double gi = s.triggers[i](z_bar);
    if (gi < g) {
      g = gi;
      active = i;
    }
  }

  LinearizedStc lin;
  const double c = s.constraint(z_bar);
  lin.value = eta_star(g) * c;
  if (g < 0.0) {
    // Product rule on -g * c; at g >= 0 the residual is identically zero.
    lin.gradient = -c * s.triggers[active].a - g * s.constraint.a;
  }
  return lin;
}

Stc parking_gap_stc(double half_width, double y_top)
{
  if (!(half_width > 0.0)) {
    throw std::invalid_argument("parking_gap_stc: half width must be positive");
  }
  Stc s;
  s.combinator = StcCombinator::any_of;
  // Fires left of the gap: x_w < -b.
  s.triggers.push_back({{1.0, 0.0, 0.0}, half_width});
  // Fires right of the gap: x_w > b.
  s.triggers.push_back({{-1.0, 0.0, 0.0}, half_width});
  // Required clearance above the obstacles: y_w >= y_top.
  s.constraint = {{0.0, -1.0, 0.0}, y_top};
  return s;
}

}  // namespace parkplan
