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

#include "parkplan/svg_plot.hpp"

#include <cmath>
#include <cstdio>

namespace parkplan::svg
{

namespace
{

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

Canvas::Canvas(int width_px, int height_px, double x_min, double x_max, double y_min,
               double y_max)
: width_(width_px), height_(height_px), x_min_(x_min), x_max_(x_max), y_min_(y_min),
  y_max_(y_max)
{
}

double Canvas::to_px_x(double x) const
{
  return (x - x_min_) / (x_max_ - x_min_) * width_;
}

double Canvas::to_px_y(double y) const
{
  return height_ - (y - y_min_) / (y_max_ - y_min_) * height_;
}

void Canvas::polyline(
  const std::vector<Vec2> & points, const std::string & color, double width_px, bool dashed)
{
  if (points.size() < 2) {
    return;
  }
  body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
        << fmt(width_px) << "\"";
  if (dashed) {
    body_ << " stroke-dasharray=\"6 4\"";
  }
  body_ << " points=\"";
  for (const Vec2 & p : points) {
    body_ << fmt(to_px_x(p.x())) << "," << fmt(to_px_y(p.y())) << " ";
  }
  body_ << "\"/>\n";
}

void Canvas::line(
  const Vec2 & a, const Vec2 & b, const std::string & color, double width_px, bool dashed)
{
  polyline({a, b}, color, width_px, dashed);
}

void Canvas::hatched_rect(double x, double y, double w, double h, const std::string & color)
{
  uses_hatch_ = true;
  body_ << "<rect x=\"" << fmt(to_px_x(x)) << "\" y=\"" << fmt(to_px_y(y + h)) << "\" width=\""
        << fmt(w / (x_max_ - x_min_) * width_) << "\" height=\""
        << fmt(h / (y_max_ - y_min_) * height_) << "\" fill=\"url(#hatch)\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
}

void Canvas::rect(double x, double y, double w, double h, const std::string & fill)
{
  body_ << "<rect x=\"" << fmt(to_px_x(x)) << "\" y=\"" << fmt(to_px_y(y + h)) << "\" width=\""
        << fmt(w / (x_max_ - x_min_) * width_) << "\" height=\""
        << fmt(h / (y_max_ - y_min_) * height_) << "\" fill=\"" << fill << "\"/>\n";
}

void Canvas::circle(const Vec2 & center, double radius_px, const std::string & color)
{
  body_ << "<circle cx=\"" << fmt(to_px_x(center.x())) << "\" cy=\"" << fmt(to_px_y(center.y()))
        << "\" r=\"" << fmt(radius_px) << "\" fill=\"" << color << "\"/>\n";
}

void Canvas::text(const Vec2 & anchor, const std::string & content, int font_px,
                  const std::string & color)
{
  body_ << "<text x=\"" << fmt(to_px_x(anchor.x())) << "\" y=\"" << fmt(to_px_y(anchor.y()))
        << "\" font-size=\"" << font_px << "\" font-family=\"sans-serif\" fill=\"" << color
        << "\">" << content << "</text>\n";
}

void Canvas::heading_tick(const Vec3 & pose, double length_world, const std::string & color)
{
  const Vec2 p{pose(0), pose(1)};
  const Vec2 q{pose(0) + length_world * std::cos(pose(2)),
               pose(1) + length_world * std::sin(pose(2))};
  line(p, q, color, 1.0);
}

std::string Canvas::finish() const
{
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
      << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
  if (uses_hatch_) {
    out << "<defs><pattern id=\"hatch\" width=\"8\" height=\"8\" "
           "patternTransform=\"rotate(45)\" patternUnits=\"userSpaceOnUse\">"
           "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#888888\" "
           "stroke-width=\"2\"/></pattern></defs>\n";
  }
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << body_.str();
  out << "</svg>\n";
  return out.str();
}

}  // namespace parkplan::svg
