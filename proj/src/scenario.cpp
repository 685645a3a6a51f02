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

#include "parkplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "parkplan/propagate.hpp"
#include "parkplan/vehicle_model.hpp"

namespace parkplan
{

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kCuspDeadband = 1e-3;

double deg(double d)
{
  return d * kPi / 180.0;
}

/// Uniform double in [0, 1) from the raw engine output, identical across
/// platforms so seeded runs stay byte-reproducible.
double next_uniform(std::mt19937_64 & gen)
{
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double lerp(const Vec2 & range, double u)
{
  return range.x() + (range.y() - range.x()) * u;
}

}  // namespace

Scenario reverse_parking()
{
  Scenario s;
  s.name = "reverse";
  s.p1 = {0.0, 1.0, -0.5 * kPi};  // center pose of the 2x2 gap, facing down
  s.stcs.push_back(parking_gap_stc(1.0, 2.0));
  s.y_bounds = {0.0, 5.0};
  s.model.kappa_max = 1.0;

  StartRegion region;
  region.x_range = {-4.5, 4.5};
  region.y_range = {2.5, 4.5};
  region.heading_intervals = {{deg(-60.0), deg(60.0)}, {deg(150.0), deg(210.0)}};
  s.start_region = region;
  s.scvx.max_iters = 150;
  s.p0 = sample_start(s, 0);
  return s;
}

Scenario parallel_parking()
{
  Scenario s;
  s.name = "parallel";
  // 5 m bay between two obstacle rows, curb at y = 0, lane above y = 1.5.
  s.p1 = {0.0, 0.75, 0.0};
  s.stcs.push_back(parking_gap_stc(2.5, 1.5));
  s.y_bounds = {0.0, 5.0};
  s.model.kappa_max = 1.0;

  StartRegion region;
  region.x_range = {-7.5, -4.5};
  region.y_range = {2.0, 3.0};
  region.heading_intervals = {{deg(-10.0), deg(10.0)}};
  s.start_region = region;
  s.scvx.max_iters = 150;
  s.p0 = sample_start(s, 0);
  return s;
}

CarState sample_start(const Scenario & s, uint64_t seed)
{
  if (!s.start_region.has_value()) {
    throw std::invalid_argument("sample_start: scenario has no start region");
  }
  const StartRegion & region = *s.start_region;
  if (region.heading_intervals.empty()) {
    throw std::invalid_argument("sample_start: empty heading interval union");
  }

  std::mt19937_64 gen(seed);
  CarState pose;
  pose.x_w = lerp(region.x_range, next_uniform(gen));
  pose.y_w = lerp(region.y_range, next_uniform(gen));

  double total = 0.0;
  for (const Vec2 & iv : region.heading_intervals) {
    total += iv.y() - iv.x();
  }
  if (total <= 0.0) {
    pose.theta = region.heading_intervals.front().x();
    return pose;
  }
  double r = next_uniform(gen) * total;
  for (const Vec2 & iv : region.heading_intervals) {
    const double width = iv.y() - iv.x();
    if (r <= width) {
      pose.theta = iv.x() + r;
      return pose;
    }
    r -= width;
  }
  pose.theta = region.heading_intervals.back().y();
  return pose;
}

std::vector<DenseSample> dense_trajectory(
  const MultiSegmentSolution & traj, const ModelParams & model_params, int n_dense)
{
  const CarModel model(model_params);
  std::vector<DenseSample> samples;
  const int n = std::max(1, n_dense);

  for (int i = 0; i < kNumSegments; ++i) {
    const SegmentTrajectory & seg = traj.segments[i];
    if (seg.K < 2) {
      continue;
    }
    const double dtau = 1.0 / (seg.K - 1);
    Vec3 x = seg.states.front().as_vector();
    samples.push_back({i, 0.0, x, seg.controls.front().as_vector()});
    for (int k = 0; k + 1 < seg.K; ++k) {
      const Vec2 u_k = seg.controls[k].as_vector();
      const Vec2 u_k1 = seg.controls[k + 1].as_vector();
      for (int j = 1; j <= n; ++j) {
        const double a = static_cast<double>(j - 1) / n;
        const double b = static_cast<double>(j) / n;
        const Vec2 u_a = (1.0 - a) * u_k + a * u_k1;
        const Vec2 u_b = (1.0 - b) * u_k + b * u_k1;
        x = propagate_interval(model, x, u_a, u_b, seg.sigma, dtau * (b - a), 2);
        samples.push_back({i, (k + b) * dtau, x, u_b});
      }
    }
  }
  return samples;
}

ViolationReport validate_trajectory(
  const MultiSegmentSolution & traj, const Scenario & s, int n_dense)
{
  ViolationReport report;
  const std::vector<DenseSample> dense = dense_trajectory(traj, s.model, n_dense);
  if (dense.empty()) {
    return report;
  }

  // Constraint checks along the re-integrated trajectory.
  for (const DenseSample & d : dense) {
    for (const Stc & stc : s.stcs) {
      report.max_stc_residual = std::max(report.max_stc_residual, residual(stc, d.state));
    }
    double bound = std::max(s.y_bounds.x() - d.state(1), d.state(1) - s.y_bounds.y());
    if (s.x_bounds.has_value()) {
      bound = std::max({bound, s.x_bounds->x() - d.state(0), d.state(0) - s.x_bounds->y()});
    }
    report.max_bound_violation = std::max(report.max_bound_violation, bound);
  }

  // Knot reproduction under dense re-integration, per segment.
  const CarModel model(s.model);
  const int n = std::max(1, n_dense);
  for (int i = 0; i < kNumSegments; ++i) {
    const SegmentTrajectory & seg = traj.segments[i];
    if (seg.K < 2) {
      continue;
    }
    const double dtau = 1.0 / (seg.K - 1);
    Vec3 x = seg.states.front().as_vector();
    for (int k = 0; k + 1 < seg.K; ++k) {
      x = propagate_interval(
        model, x, seg.controls[k].as_vector(), seg.controls[k + 1].as_vector(), seg.sigma,
        dtau, 2 * n);
      report.dynamics_error = std::max(
        report.dynamics_error,
        (x - seg.states[k + 1].as_vector()).lpNorm<Eigen::Infinity>());
    }
  }

  // Boundary poses against the scenario, heading on the unwrapped branch.
  const CarState goal = unwrap_goal_heading(s.p0, s.p1);
  const Vec3 start = dense.front().state;
  const Vec3 end = dense.back().state;
  report.boundary_position_error = std::max(
    (start.head<2>() - s.p0.as_vector().head<2>()).norm(),
    (end.head<2>() - goal.as_vector().head<2>()).norm());
  report.boundary_heading_error =
    std::max(std::abs(start(2) - s.p0.theta), std::abs(end(2) - goal.theta));

  for (int i = 0; i + 1 < kNumSegments; ++i) {
    if (traj.segments[i].K < 1 || traj.segments[i + 1].K < 1) {
      continue;
    }
    report.continuity_gap = std::max(
      report.continuity_gap, (traj.segments[i].states.back().as_vector() -
                              traj.segments[i + 1].states.front().as_vector())
                               .lpNorm<Eigen::Infinity>());
  }

  for (const SegmentTrajectory & seg : traj.segments) {
    for (const CarControl & u : seg.controls) {
      report.control_box_violation = std::max(
        {report.control_box_violation, std::abs(u.u1) - 1.0, std::abs(u.u2) - 1.0});
    }
    report.duration += seg.sigma;
  }

  for (size_t j = 1; j < dense.size(); ++j) {
    report.path_length += (dense[j].state.head<2>() - dense[j - 1].state.head<2>()).norm();
  }

  // Cusps: sign regime changes of the speed control with a dead band.
  int last_sign = 0;
  for (const DenseSample & d : dense) {
    const double u1 = d.control(0);
    const int sign = u1 > kCuspDeadband ? 1 : (u1 < -kCuspDeadband ? -1 : 0);
    if (sign != 0) {
      if (last_sign != 0 && sign != last_sign) {
        ++report.cusp_count;
      }
      last_sign = sign;
    }
  }
  return report;
}

namespace
{

nlohmann::json affine_to_json(const AffineStateFn & f)
{
  return {{"a", {f.a(0), f.a(1), f.a(2)}}, {"b", f.b}};
}

AffineStateFn affine_from_json(const nlohmann::json & j)
{
  AffineStateFn f;
  const auto a = j.at("a").get<std::vector<double>>();
  f.a = Vec3{a.at(0), a.at(1), a.at(2)};
  f.b = j.at("b").get<double>();
  return f;
}

nlohmann::json pose_to_json(const CarState & p)
{
  return {p.x_w, p.y_w, p.theta};
}

CarState pose_from_json(const nlohmann::json & j)
{
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

nlohmann::json scenario_to_json(const Scenario & s)
{
  nlohmann::json j;
  j["schema_version"] = 1;
  j["name"] = s.name;
  j["p0"] = pose_to_json(s.p0);
  j["p1"] = pose_to_json(s.p1);
  j["stcs"] = nlohmann::json::array();
  for (const Stc & stc : s.stcs) {
    nlohmann::json js;
    js["combinator"] = stc.combinator == StcCombinator::any_of ? "or" : "single";
    js["triggers"] = nlohmann::json::array();
    for (const AffineStateFn & g : stc.triggers) {
      js["triggers"].push_back(affine_to_json(g));
    }
    js["constraint"] = affine_to_json(stc.constraint);
    j["stcs"].push_back(js);
  }
  j["y_bounds"] = {s.y_bounds.x(), s.y_bounds.y()};
  if (s.x_bounds.has_value()) {
    j["x_bounds"] = {s.x_bounds->x(), s.x_bounds->y()};
  }
  j["model"] = {{"kappa_max", s.model.kappa_max}};
  j["weights"] = {
    {"sigma", s.scvx.weights.sigma},
    {"nu", s.scvx.weights.nu},
    {"jerk", s.scvx.weights.jerk},
    {"length", s.scvx.weights.length}};
  j["scvx"] = {
    {"knots", s.scvx.K},
    {"max_iters", s.scvx.max_iters},
    {"eps_step", s.scvx.eps_step},
    {"eps_nu", s.scvx.eps_nu},
    {"sigma_min", s.scvx.sigma_min},
    {"sigma_max", s.scvx.sigma_max},
    {"steering_joint_continuity", s.scvx.steering_joint_continuity},
    {"rk4_substeps", s.scvx.discretization.rk4_substeps},
    {"trust",
     {{"initial", s.scvx.trust.initial},
      {"rho0", s.scvx.trust.rho0},
      {"rho1", s.scvx.trust.rho1},
      {"rho2", s.scvx.trust.rho2},
      {"alpha_shrink", s.scvx.trust.alpha_shrink},
      {"alpha_grow", s.scvx.trust.alpha_grow},
      {"min_radius", s.scvx.trust.min_radius},
      {"max_radius", s.scvx.trust.max_radius}}}};
  if (s.start_region.has_value()) {
    nlohmann::json r;
    r["x"] = {s.start_region->x_range.x(), s.start_region->x_range.y()};
    r["y"] = {s.start_region->y_range.x(), s.start_region->y_range.y()};
    r["heading_intervals"] = nlohmann::json::array();
    for (const Vec2 & iv : s.start_region->heading_intervals) {
      r["heading_intervals"].push_back({iv.x(), iv.y()});
    }
    j["start_region"] = r;
  }
  return j;
}

Scenario scenario_from_json(const nlohmann::json & j)
{
  Scenario s;
  s.name = j.value("name", "custom");
  s.p0 = pose_from_json(j.at("p0"));
  s.p1 = pose_from_json(j.at("p1"));
  for (const auto & js : j.value("stcs", nlohmann::json::array())) {
    Stc stc;
    stc.combinator =
      js.value("combinator", "single") == "or" ? StcCombinator::any_of : StcCombinator::single;
    for (const auto & g : js.at("triggers")) {
      stc.triggers.push_back(affine_from_json(g));
    }
    stc.constraint = affine_from_json(js.at("constraint"));
    s.stcs.push_back(stc);
  }
  const auto yb = j.at("y_bounds").get<std::vector<double>>();
  s.y_bounds = {yb.at(0), yb.at(1)};
  if (j.contains("x_bounds")) {
    const auto xb = j.at("x_bounds").get<std::vector<double>>();
    s.x_bounds = Vec2{xb.at(0), xb.at(1)};
  }
  if (j.contains("model")) {
    s.model.kappa_max = j.at("model").value("kappa_max", 1.0);
  }
  if (j.contains("weights")) {
    const auto & w = j.at("weights");
    s.scvx.weights.sigma = w.value("sigma", s.scvx.weights.sigma);
    s.scvx.weights.nu = w.value("nu", s.scvx.weights.nu);
    s.scvx.weights.jerk = w.value("jerk", s.scvx.weights.jerk);
    s.scvx.weights.length = w.value("length", s.scvx.weights.length);
  }
  if (j.contains("scvx")) {
    const auto & c = j.at("scvx");
    s.scvx.K = c.value("knots", s.scvx.K);
    s.scvx.max_iters = c.value("max_iters", s.scvx.max_iters);
    s.scvx.eps_step = c.value("eps_step", s.scvx.eps_step);
    s.scvx.eps_nu = c.value("eps_nu", s.scvx.eps_nu);
    s.scvx.sigma_min = c.value("sigma_min", s.scvx.sigma_min);
    s.scvx.sigma_max = c.value("sigma_max", s.scvx.sigma_max);
    s.scvx.steering_joint_continuity =
      c.value("steering_joint_continuity", s.scvx.steering_joint_continuity);
    s.scvx.discretization.rk4_substeps =
      c.value("rk4_substeps", s.scvx.discretization.rk4_substeps);
    if (c.contains("trust")) {
      const auto & t = c.at("trust");
      s.scvx.trust.initial = t.value("initial", s.scvx.trust.initial);
      s.scvx.trust.rho0 = t.value("rho0", s.scvx.trust.rho0);
      s.scvx.trust.rho1 = t.value("rho1", s.scvx.trust.rho1);
      s.scvx.trust.rho2 = t.value("rho2", s.scvx.trust.rho2);
      s.scvx.trust.alpha_shrink = t.value("alpha_shrink", s.scvx.trust.alpha_shrink);
      s.scvx.trust.alpha_grow = t.value("alpha_grow", s.scvx.trust.alpha_grow);
      s.scvx.trust.min_radius = t.value("min_radius", s.scvx.trust.min_radius);
      s.scvx.trust.max_radius = t.value("max_radius", s.scvx.trust.max_radius);
    }
  }
  if (j.contains("start_region")) {
    const auto & r = j.at("start_region");
    StartRegion region;
    const auto xr = r.at("x").get<std::vector<double>>();
    const auto yr = r.at("y").get<std::vector<double>>();
    region.x_range = {xr.at(0), xr.at(1)};
    region.y_range = {yr.at(0), yr.at(1)};
    for (const auto & iv : r.at("heading_intervals")) {
      region.heading_intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    }
    s.start_region = region;
  }
  return s;
}

}  // namespace parkplan
