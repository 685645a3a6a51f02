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

#include <sstream>
#include <string>
#include <vector>

#include "parkplan/types.hpp"

namespace parkplan::svg
{

/// Minimal SVG writer over a world-coordinate viewport (y axis up).
class Canvas
{
public:
  Canvas(int width_px, int height_px, double x_min, double x_max, double y_min, double y_max);

  void polyline(
    const std::vector<Vec2> & points, const std::string & color, double width_px,
    bool dashed = false);
  void line(
    const Vec2 & a, const Vec2 & b, const std::string & color, double width_px,
    bool dashed = false);
  void hatched_rect(double x, double y, double w, double h, const std::string & color);
  void rect(double x, double y, double w, double h, const std::string & fill);
  void circle(const Vec2 & center, double radius_px, const std::string & color);
  void text(const Vec2 & anchor, const std::string & content, int font_px,
            const std::string & color = "#333333");
  /// Short tick centered at the pose showing the heading.
  void heading_tick(const Vec3 & pose, double length_world, const std::string & color);

  std::string finish() const;

  double to_px_x(double x) const;
  double to_px_y(double y) const;

private:
  int width_, height_;
  double x_min_, x_max_, y_min_, y_max_;
  bool uses_hatch_ = false;
  std::ostringstream body_;
};

}  // namespace parkplan::svg
