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

#include <string>
#include <vector>

#include "parkplan/types.hpp"

namespace parkplan
{

enum class RsSegmentType
{
  left,
  straight,
  right,
};

/// One motion primitive: segment type, direction of travel and nonnegative
/// parameter (arc angle for turns, length for straights, in units of R).
struct RsPrimitive
{
  RsSegmentType type = RsSegmentType::straight;
  int direction = 1;  // +1 forward, -1 backward
  double param = 0.0;
};

/// A Reeds-Shepp path: at most five primitives; total length in units of R.
struct RsPath
{
  std::vector<RsPrimitive> word;
  double total_length = 0.0;

  std::string word_string() const;  // e.g. "L+S+R-"
};

/// Shortest path over the full 48-word family connecting q0 to q1 with
/// turning radius R. Ties break lexicographically on the word encoding.
RsPath shortest_path(const CarState & q0, const CarState & q1, double R);

/// Poses along the path at arc-length steps ds [m], starting at q0 and with
/// the exact endpoint appended. Headings are continuous (unwrapped).
std::vector<CarState> sample(const RsPath & path, const CarState & q0, double R, double ds);

}  // namespace parkplan
