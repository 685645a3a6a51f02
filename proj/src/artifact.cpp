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

#include "parkplan/artifact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "parkplan/svg_plot.hpp"

namespace parkplan
{

namespace
{

nlohmann::json segment_to_json(const SegmentTrajectory & seg)
{
  nlohmann::json j;
  j["K"] = seg.K;
  j["sigma"] = seg.sigma;
  j["states"] = nlohmann::json::array();
  for (const CarState & x : seg.states) {
    j["states"].push_back({x.x_w, x.y_w, x.theta});
  }
  j["controls"] = nlohmann::json::array();
  for (const CarControl & u : seg.controls) {
    j["controls"].push_back({u.u1, u.u2});
  }
  return j;
}

SegmentTrajectory segment_from_json(const nlohmann::json & j)
{
  SegmentTrajectory seg;
  seg.K = j.at("K").get<int>();
  seg.sigma = j.at("sigma").get<double>();
  for (const auto & x : j.at("states")) {
    seg.states.push_back({x.at(0).get<double>(), x.at(1).get<double>(), x.at(2).get<double>()});
  }
  for (const auto & u : j.at("controls")) {
    seg.controls.push_back({u.at(0).get<double>(), u.at(1).get<double>()});
  }
  return seg;
}

nlohmann::json report_to_json(const ViolationReport & r)
{
  return {
    {"max_stc_residual", r.max_stc_residual},
    {"max_bound_violation", r.max_bound_violation},
    {"boundary_position_error", r.boundary_position_error},
    {"boundary_heading_error", r.boundary_heading_error},
    {"continuity_gap", r.continuity_gap},
    {"control_box_violation", r.control_box_violation},
    {"dynamics_error", r.dynamics_error},
    {"path_length", r.path_length},
    {"duration", r.duration},
    {"cusp_count", r.cusp_count}};
}

ViolationReport report_from_json(const nlohmann::json & j)
{
  ViolationReport r;
  r.max_stc_residual = j.at("max_stc_residual").get<double>();
  r.max_bound_violation = j.at("max_bound_violation").get<double>();
  r.boundary_position_error = j.at("boundary_position_error").get<double>();
  r.boundary_heading_error = j.at("boundary_heading_error").get<double>();
  r.continuity_gap = j.at("continuity_gap").get<double>();
  r.control_box_violation = j.at("control_box_violation").get<double>();
  r.dynamics_error = j.at("dynamics_error").get<double>();
  r.path_length = j.at("path_length").get<double>();
  r.duration = j.at("duration").get<double>();
  r.cusp_count = j.at("cusp_count").get<int>();
  return r;
}

}  // namespace

nlohmann::json iteration_record_to_json(const IterationRecord & r)
{
  return {
    {"iteration", r.iteration},
    {"cost_total", r.cost_total},
    {"cost_sigma", r.cost_sigma},
    {"cost_jerk", r.cost_jerk},
    {"cost_length", r.cost_length},
    {"nu_norm1", r.nu_norm1},
    {"stc_slack_norm1", r.stc_slack_norm1},
    {"trust_radius", r.trust_radius},
    {"predicted_decrease", r.predicted_decrease},
    {"actual_decrease", r.actual_decrease},
    {"ratio", r.ratio},
    {"accepted", r.accepted},
    {"step_norm", r.step_norm},
    {"sigma_total", r.sigma_total}};
}

IterationRecord iteration_record_from_json(const nlohmann::json & j)
{
  IterationRecord r;
  r.iteration = j.at("iteration").get<int>();
  r.cost_total = j.at("cost_total").get<double>();
  r.cost_sigma = j.at("cost_sigma").get<double>();
  r.cost_jerk = j.at("cost_jerk").get<double>();
  r.cost_length = j.at("cost_length").get<double>();
  r.nu_norm1 = j.at("nu_norm1").get<double>();
  r.stc_slack_norm1 = j.at("stc_slack_norm1").get<double>();
  r.trust_radius = j.at("trust_radius").get<double>();
  r.predicted_decrease = j.at("predicted_decrease").get<double>();
  r.actual_decrease = j.at("actual_decrease").get<double>();
  r.ratio = j.at("ratio").get<double>();
  r.accepted = j.at("accepted").get<bool>();
  r.step_norm = j.at("step_norm").get<double>();
  r.sigma_total = j.at("sigma_total").get<double>();
  return r;
}

nlohmann::json artifact_to_json(const RunArtifact & a)
{
  nlohmann::json j;
  j["schema_version"] = a.schema_version;
  j["seed"] = a.seed;
  j["scenario"] = a.scenario;
  j["goal_used"] = {a.goal_used.x_w, a.goal_used.y_w, a.goal_used.theta};
  j["converged"] = a.converged;
  j["iterations"] = a.iterations;
  j["failure_reason"] = a.failure_reason;
  j["segments"] = nlohmann::json::array();
  for (const SegmentTrajectory & seg : a.segments) {
    j["segments"].push_back(segment_to_json(seg));
  }
  j["dense"] = nlohmann::json::array();
  for (const DenseSample & d : a.dense) {
    j["dense"].push_back(
      {d.segment, d.tau, d.state(0), d.state(1), d.state(2), d.control(0), d.control(1)});
  }
  j["rs_samples"] = nlohmann::json::array();
  for (const CarState & p : a.rs_samples) {
    j["rs_samples"].push_back({p.x_w, p.y_w, p.theta});
  }
  j["rs_length"] = a.rs_length;
  j["scvx_length"] = a.scvx_length;
  j["report"] = report_to_json(a.report);
  j["history"] = nlohmann::json::array();
  for (const IterationRecord & r : a.history) {
    j["history"].push_back(iteration_record_to_json(r));
  }
  return j;
}

RunArtifact artifact_from_json(const nlohmann::json & j)
{
  RunArtifact a;
  a.schema_version = j.at("schema_version").get<int>();
  a.seed = j.at("seed").get<uint64_t>();
  a.scenario = j.at("scenario");
  a.goal_used = {
    j.at("goal_used").at(0).get<double>(), j.at("goal_used").at(1).get<double>(),
    j.at("goal_used").at(2).get<double>()};
  a.converged = j.at("converged").get<bool>();
  a.iterations = j.at("iterations").get<int>();
  a.failure_reason = j.at("failure_reason").get<std::string>();
  int i = 0;
  for (const auto & seg : j.at("segments")) {
    a.segments.at(i++) = segment_from_json(seg);
  }
  for (const auto & d : j.at("dense")) {
    DenseSample s;
    s.segment = d.at(0).get<int>();
    s.tau = d.at(1).get<double>();
    s.state = Vec3{d.at(2).get<double>(), d.at(3).get<double>(), d.at(4).get<double>()};
    s.control = Vec2{d.at(5).get<double>(), d.at(6).get<double>()};
    a.dense.push_back(s);
  }
  for (const auto & p : j.at("rs_samples")) {
    a.rs_samples.push_back(
      {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  }
  a.rs_length = j.at("rs_length").get<double>();
  a.scvx_length = j.at("scvx_length").get<double>();
  a.report = report_from_json(j.at("report"));
  for (const auto & r : j.at("history")) {
    a.history.push_back(iteration_record_from_json(r));
  }
  return a;
}

void write_knots_csv(std::ostream & out, const std::array<SegmentTrajectory, kNumSegments> & segs)
{
  out << "segment,k,tau,x_w,y_w,theta,u1,u2\n";
  char buf[64];
  for (int i = 0; i < kNumSegments; ++i) {
    const SegmentTrajectory & seg = segs[i];
    for (int k = 0; k < seg.K; ++k) {
      const double tau = seg.K > 1 ? static_cast<double>(k) / (seg.K - 1) : 0.0;
      out << i << "," << k;
      const double cols[6] = {tau,
                              seg.states[k].x_w,
                              seg.states[k].y_w,
                              seg.states[k].theta,
                              seg.controls[k].u1,
                              seg.controls[k].u2};
      for (double v : cols) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << "," << buf;
      }
      out << "\n";
    }
  }
}

void write_history_jsonl(std::ostream & out, const std::vector<IterationRecord> & history)
{
  for (const IterationRecord & r : history) {
    out << iteration_record_to_json(r).dump() << "\n";
  }
}

namespace
{

/// Obstacle rectangles of the canonical gap trigger: two blocks below the
/// clearance line flanking |x| < b. Returns {x, y, w, h} tuples.
std::vector<std::array<double, 4>> obstacle_rects(
  const Scenario & s, double x_lo, double x_hi)
{
  std::vector<std::array<double, 4>> rects;
  for (const Stc & stc : s.stcs) {
    if (stc.triggers.size() != 2) {
      continue;
    }
    const AffineStateFn & left = stc.triggers[0];
    const AffineStateFn & right = stc.triggers[1];
    const AffineStateFn & c = stc.constraint;
    const bool gap_pattern = left.a(0) == 1.0 && left.a(1) == 0.0 && right.a(0) == -1.0 &&
                             right.a(1) == 0.0 && c.a(1) == -1.0;
    if (!gap_pattern) {
      continue;
    }
    const double b = left.b;
    const double y_top = c.b;
    const double y_floor = s.y_bounds.x();
    rects.push_back({x_lo, y_floor, -b - x_lo, y_top - y_floor});
    rects.push_back({b, y_floor, x_hi - b, y_top - y_floor});
  }
  return rects;
}

}  // namespace

std::string plot_trajectory_svg(const RunArtifact & a)
{
  const Scenario scenario = scenario_from_json(a.scenario);

  double x_lo = scenario.p0.x_w, x_hi = scenario.p0.x_w;
  double y_lo = scenario.y_bounds.x(), y_hi = scenario.y_bounds.y();
  auto grow = [&](double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  };
  for (const DenseSample & d : a.dense) {
    grow(d.state(0), d.state(1));
  }
  for (const CarState & p : a.rs_samples) {
    grow(p.x_w, p.y_w);
  }
  const double margin = 1.0;
  x_lo -= margin;
  x_hi += margin;
  y_lo -= margin;
  y_hi += margin;

  const double aspect = (y_hi - y_lo) / (x_hi - x_lo);
  const int width = 860;
  const int height = std::max(240, static_cast<int>(width * aspect));
  svg::Canvas canvas(width, height, x_lo, x_hi, y_lo, y_hi);

  for (const auto & r : obstacle_rects(scenario, x_lo, x_hi)) {
    canvas.hatched_rect(r[0], r[1], r[2], r[3], "#555555");
  }
  canvas.line({x_lo, scenario.y_bounds.x()}, {x_hi, scenario.y_bounds.x()}, "#aaaaaa", 1.0,
              true);
  canvas.line({x_lo, scenario.y_bounds.y()}, {x_hi, scenario.y_bounds.y()}, "#aaaaaa", 1.0,
              true);

  if (!a.rs_samples.empty()) {
    std::vector<Vec2> pts;
    pts.reserve(a.rs_samples.size());
    for (const CarState & p : a.rs_samples) {
      pts.push_back({p.x_w, p.y_w});
    }
    canvas.polyline(pts, "#222222", 1.5, true);
  }

  const char * seg_colors[kNumSegments] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
  for (int i = 0; i < kNumSegments; ++i) {
    std::vector<Vec2> pts;
    for (const DenseSample & d : a.dense) {
      if (d.segment == i) {
        pts.push_back({d.state(0), d.state(1)});
      }
    }
    canvas.polyline(pts, seg_colors[i], 2.5);
    int tick = 0;
    for (const DenseSample & d : a.dense) {
      if (d.segment == i && tick++ % 10 == 0) {
        canvas.heading_tick(d.state, 0.25, seg_colors[i]);
      }
    }
  }

  canvas.circle({scenario.p0.x_w, scenario.p0.y_w}, 5.0, "#d62728");
  canvas.circle({a.goal_used.x_w, a.goal_used.y_w}, 5.0, "#9467bd");
  canvas.heading_tick(scenario.p0.as_vector(), 0.6, "#d62728");
  canvas.heading_tick(a.goal_used.as_vector(), 0.6, "#9467bd");

  canvas.text({x_lo + 0.2, y_hi - 0.4}, scenario.name, 16);
  char info[128];
  std::snprintf(info, sizeof(info), "length %.2f m, duration %.2f s, cusps %d",
                a.report.path_length, a.report.duration, a.report.cusp_count);
  canvas.text({x_lo + 0.2, y_lo + 0.2}, info, 13);
  return canvas.finish();
}

std::string plot_history_svg(const std::vector<IterationRecord> & history)
{
  const int width = 860;
  const int panel = 200;
  const int gap = 30;
  const int height = 3 * panel + 4 * gap;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (!history.empty()) {
    const int n = static_cast<int>(history.size());
    auto panel_plot = [&](int index, const std::string & label, auto value,
                          const std::string & color) {
      double lo = 1e300, hi = -1e300;
      for (const IterationRecord & r : history) {
        lo = std::min(lo, value(r));
        hi = std::max(hi, value(r));
      }
      if (hi - lo < 1e-12) {
        hi = lo + 1.0;
      }
      const double top = gap + index * (panel + gap);
      auto px = [&](int i) {
        return 50.0 + (width - 70.0) * (n > 1 ? static_cast<double>(i) / (n - 1) : 0.0);
      };
      auto py = [&](double v) { return top + panel - (v - lo) / (hi - lo) * panel; };
      out << "<rect x=\"50\" y=\"" << top << "\" width=\"" << width - 70 << "\" height=\""
          << panel << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (int i = 0; i < n; ++i) {
        out << px(i) << "," << py(value(history[i])) << " ";
      }
      out << "\"/>\n";
      for (int i = 0; i < n; ++i) {
        if (history[i].accepted) {
          out << "<circle cx=\"" << px(i) << "\" cy=\"" << py(value(history[i]))
              << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
      }
      out << "<text x=\"55\" y=\"" << top + 16
          << "\" font-size=\"13\" font-family=\"sans-serif\" fill=\"#333333\">" << label
          << "</text>\n";
    };
    panel_plot(0, "penalized cost", [](const IterationRecord & r) { return r.cost_total; },
               "#1f77b4");
    panel_plot(1, "log10 |nu|_1 + stc slack",
               [](const IterationRecord & r) {
                 return std::log10(r.nu_norm1 + r.stc_slack_norm1 + 1e-16);
               },
               "#d62728");
    panel_plot(2, "trust radius", [](const IterationRecord & r) { return r.trust_radius; },
               "#2ca02c");
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace parkplan
