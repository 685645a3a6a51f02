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

#include "parkplan/types.hpp"

namespace parkplan
{

/// Affine function of the state, a . (x_w, y_w, theta) + b.
struct AffineStateFn
{
  Vec3 a = Vec3::Zero();
  double b = 0.0;

  double operator()(const Vec3 & z) const { return a.dot(z) + b; }
};

enum class StcCombinator
{
  single,
  any_of,  // logical OR over the triggers
};

/// State-triggered constraint: when any trigger g_i(z) < 0 fires, the
/// constraint c(z) <= 0 must hold. Encoded continuously through the
/// residual h(z) = -min(g(z), 0) * c(z) with g = min_i g_i.
struct Stc
{
  std::vector<AffineStateFn> triggers;
  StcCombinator combinator = StcCombinator::single;
  AffineStateFn constraint;
};

/// Affine approximation h(z) ~= value + gradient . (z - z_bar).
struct LinearizedStc
{
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
};

/// Analytic slack of the complementarity form: eta* = -min(g, 0).
double eta_star(double g_value);

/// Trigger value g(z): the single trigger, or min over OR-composed triggers.
double trigger_value(const Stc & s, const Vec3 & z);

/// Continuous residual h(z) = -min(g(z), 0) * c(z); h <= 0 exactly when the
/// implication holds or no trigger fires.
double residual(const Stc & s, const Vec3 & z);

/// Linearizes the residual at z_bar with the subgradient convention that the
/// constraint is dormant at g = 0; for OR triggers the active one is the
/// argmin with ties toward the first.
LinearizedStc linearize(const Stc & s, const Vec3 & z_bar);

/// Obstacle pair flanking a gap of half-width b: being outside the gap in x
/// triggers the clearance requirement y_w >= y_top.
Stc parking_gap_stc(double half_width, double y_top);

}  // namespace parkplan
