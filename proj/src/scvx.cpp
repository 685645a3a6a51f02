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

#include "parkplan/scvx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "parkplan/propagate.hpp"
#include "parkplan/scenario.hpp"
#include "parkplan/stc.hpp"
#include "parkplan/vehicle_model.hpp"

namespace parkplan
{

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CostBreakdown
{
  double sigma = 0.0;
  double jerk = 0.0;
  double length = 0.0;
  double defect = 0.0;      // scaled l1 dynamics defect
  double stc_excess = 0.0;  // positive part of the trigger residuals

  double total(const CostWeights & w) const
  {
    return w.sigma * sigma + w.jerk * jerk + w.length * length +
           w.nu * (defect + stc_excess);
  }
};

/// Penalized nonlinear cost of a candidate trajectory, in the same scaled
/// units as the subproblem objective so the ratio test is consistent.
CostBreakdown nonlinear_cost(
  const std::array<SegmentTrajectory, kNumSegments> & segs, const Scenario & scenario,
  const ScvxParams & params, const ScalingTransform & scaling, const DynamicsModel & model)
{
  CostBreakdown cost;
  const double dtau = 1.0 / (params.K - 1);
  for (const SegmentTrajectory & seg : segs) {
    cost.sigma += scaling.scale_sigma(seg.sigma);

    for (int c = 0; c < 2; ++c) {
      double sq = 0.0;
      for (int k = 0; k + 1 < seg.K; ++k) {
        const double d = scaling.scale_control(seg.controls[k + 1].as_vector())(c) -
                         scaling.scale_control(seg.controls[k].as_vector())(c);
        sq += d * d;
      }
      cost.jerk += std::sqrt(sq);
    }

    for (int k = 0; k + 1 < seg.K; ++k) {
      const Vec3 d = (seg.states[k + 1].as_vector() - seg.states[k].as_vector())
                       .cwiseQuotient(scaling.x_scale);
      cost.length += std::abs(d(0)) + std::abs(d(1));
    }

    for (int k = 0; k + 1 < seg.K; ++k) {
      const Vec3 propagated = propagate_interval(
        model, seg.states[k].as_vector(), seg.controls[k].as_vector(),
        seg.controls[k + 1].as_vector(), seg.sigma, dtau, params.discretization.rk4_substeps);
      const Vec3 defect =
        (seg.states[k + 1].as_vector() - propagated).cwiseQuotient(scaling.x_scale);
      cost.defect += defect.lpNorm<1>();
    }

    for (const Stc & stc : scenario.stcs) {
      for (int k = 0; k < seg.K; ++k) {
        cost.stc_excess += std::max(residual(stc, seg.states[k].as_vector()), 0.0);
      }
    }
  }
  return cost;
}

}  // namespace

CarState unwrap_goal_heading(const CarState & p0, const CarState & p1)
{
  CarState goal = p1;
  goal.theta += kTwoPi * std::round((p0.theta - p1.theta) / kTwoPi);
  return goal;
}

std::array<SegmentTrajectory, kNumSegments> initialize_segments(
  const CarState & p0, const CarState & p1, const ScvxParams & params)
{
  const Vec3 a = p0.as_vector();
  const Vec3 b = p1.as_vector();
  const double segment_distance = (b - a).head<2>().norm() / kNumSegments;
  // Order-of-magnitude duration guess: half the maximum speed over the piece.
  const double sigma0 = std::clamp(segment_distance / 0.5, params.sigma_min, params.sigma_max);

  std::array<SegmentTrajectory, kNumSegments> segs;
  for (int i = 0; i < kNumSegments; ++i) {
    SegmentTrajectory & seg = segs[i];
    seg.K = params.K;
    seg.sigma = sigma0;
    seg.states.resize(params.K);
    seg.controls.assign(params.K, CarControl{});
    for (int k = 0; k < params.K; ++k) {
      const double alpha =
        (i + static_cast<double>(k) / (params.K - 1)) / static_cast<double>(kNumSegments);
      seg.states[k] = CarState::from_vector(a + alpha * (b - a));
    }
  }
  return segs;
}

TrustRegionDecision trust_region_update(
  double predicted_decrease, double actual_decrease, double radius,
  const TrustRegionParams & params)
{
  auto clamp_radius = [&](double r) {
    return std::clamp(r, params.min_radius, params.max_radius);
  };
  if (!(predicted_decrease > 0.0)) {
    return {false, clamp_radius(radius / params.alpha_shrink)};
  }
  const double ratio = actual_decrease / predicted_decrease;
  if (ratio < params.rho0) {
    return {false, clamp_radius(radius / params.alpha_shrink)};
  }
  if (ratio < params.rho1) {
    return {true, clamp_radius(radius / params.alpha_shrink)};
  }
  if (ratio < params.rho2) {
    return {true, clamp_radius(radius)};
  }
  return {true, clamp_radius(radius * params.alpha_grow)};
}

Bounds scaling_bounds(const Scenario & scenario, const CarState & p0, const CarState & p1)
{
  Bounds b;
  if (scenario.x_bounds.has_value()) {
    b.x_min(0) = scenario.x_bounds->x();
    b.x_max(0) = scenario.x_bounds->y();
  } else {
    b.x_min(0) = std::min(p0.x_w, p1.x_w) - 6.0;
    b.x_max(0) = std::max(p0.x_w, p1.x_w) + 6.0;
  }
  b.x_min(1) = scenario.y_bounds.x();
  b.x_max(1) = scenario.y_bounds.y();
  b.x_min(2) = std::min(p0.theta, p1.theta) - std::numbers::pi;
  b.x_max(2) = std::max(p0.theta, p1.theta) + std::numbers::pi;
  b.u_min = Vec2{-1.0, -1.0};
  b.u_max = Vec2{1.0, 1.0};
  b.sigma_min = scenario.scvx.sigma_min;
  b.sigma_max = scenario.scvx.sigma_max;
  return b;
}

Subproblem build_subproblem(
  const std::array<SegmentTrajectory, kNumSegments> & ref,
  const std::array<LtvSystem, kNumSegments> & ltv, const Scenario & scenario,
  double trust_radius, const ScalingTransform & scaling, const ScvxParams & params)
{
  using conic::AffineExpr;
  const int K = params.K;
  for (const SegmentTrajectory & seg : ref) {
    if (seg.K != K) {
      throw std::invalid_argument("build_subproblem: reference knot count mismatch");
    }
  }
  for (const LtvSystem & sys : ltv) {
    if (sys.K != K) {
      throw std::invalid_argument("build_subproblem: ltv knot count mismatch");
    }
  }

  Subproblem sub;
  conic::ConicProblem & p = sub.problem;
  SubproblemLayout & lay = sub.layout;
  lay.K = K;
  for (int i = 0; i < kNumSegments; ++i) {
    lay.x_start[i] = p.add_variable_block(3 * K);
    lay.u_start[i] = p.add_variable_block(2 * K);
    lay.sigma_index[i] = p.add_variable_block(1);
    lay.nu_start[i] = p.add_variable_block(3 * (K - 1));
  }
  lay.core_count = p.num_vars();

  auto xv = [&](int i, int k, int j) { return AffineExpr::variable(lay.x(i, k, j)); };
  auto uv = [&](int i, int k, int j) { return AffineExpr::variable(lay.u(i, k, j)); };

  // Unscaled affine views of the decision variables.
  auto x_phys = [&](int i, int k, int j) {
    AffineExpr e(scaling.x_offset(j));
    e.add_term(lay.x(i, k, j), scaling.x_scale(j));
    return e;
  };
  auto u_phys = [&](int i, int k, int j) {
    AffineExpr e(scaling.u_offset(j));
    e.add_term(lay.u(i, k, j), scaling.u_scale(j));
    return e;
  };

  // (cost) time dilation
  for (int i = 0; i < kNumSegments; ++i) {
    p.add_objective_term(lay.sigma_index[i], params.weights.sigma);
  }

  // (a) linearized dynamics with virtual control, per segment and interval
  for (int i = 0; i < kNumSegments; ++i) {
    for (int k = 0; k + 1 < K; ++k) {
      for (int j = 0; j < 3; ++j) {
        AffineExpr e = xv(i, k + 1, j);
        for (int j2 = 0; j2 < 3; ++j2) {
          e.add_term(lay.x(i, k, j2), -ltv[i].A[k](j, j2));
        }
        for (int j2 = 0; j2 < 2; ++j2) {
          e.add_term(lay.u(i, k, j2), -ltv[i].B_minus[k](j, j2));
          e.add_term(lay.u(i, k + 1, j2), -ltv[i].B_plus[k](j, j2));
        }
        e.add_term(lay.sigma_index[i], -ltv[i].S[k](j));
        e.add_constant(-ltv[i].w[k](j));
        e.add_term(lay.nu(i, k, j), -1.0);
        p.add_equality(e);
      }
    }
  }

  // (cost) l1 penalty on the virtual control
  for (int i = 0; i < kNumSegments; ++i) {
    for (int k = 0; k + 1 < K; ++k) {
      for (int j = 0; j < 3; ++j) {
        const int t = p.add_abs_epigraph(AffineExpr::variable(lay.nu(i, k, j)));
        p.add_objective_term(t, params.weights.nu);
      }
    }
  }

  // (c) boundary, continuity and speed-joint equalities
  const Vec3 p0_hat = scaling.scale_state(scenario.p0.as_vector());
  const Vec3 p1_hat = scaling.scale_state(scenario.p1.as_vector());
  for (int j = 0; j < 3; ++j) {
    p.add_equality(xv(0, 0, j) - AffineExpr(p0_hat(j)));
    p.add_equality(xv(kNumSegments - 1, K - 1, j) - AffineExpr(p1_hat(j)));
    p.add_equality(xv(0, K - 1, j) - xv(1, 0, j));
    p.add_equality(xv(1, K - 1, j) - xv(2, 0, j));
  }
  const double zero_speed_hat = scaling.scale_control(Vec2::Zero())(0);
  for (const auto & [seg, knot] : std::vector<std::pair<int, int>>{
         {0, K - 1}, {1, 0}, {1, K - 1}, {2, 0}, {2, K - 1}}) {
    p.add_equality(uv(seg, knot, 0) - AffineExpr(zero_speed_hat));
  }
  if (params.steering_joint_continuity) {
    p.add_equality(uv(0, K - 1, 1) - uv(1, 0, 1));
    p.add_equality(uv(1, K - 1, 1) - uv(2, 0, 1));
  }

  // (d) control box |u| <= 1
  for (int i = 0; i < kNumSegments; ++i) {
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < 2; ++j) {
        p.add_nonneg(AffineExpr(1.0) - u_phys(i, k, j));
        p.add_nonneg(u_phys(i, k, j) + AffineExpr(1.0));
      }
    }
  }

  // (e) scenario position bounds at every knot
  for (int i = 0; i < kNumSegments; ++i) {
    for (int k = 0; k < K; ++k) {
      p.add_nonneg(AffineExpr(scenario.y_bounds.y()) - x_phys(i, k, 1));
      p.add_nonneg(x_phys(i, k, 1) - AffineExpr(scenario.y_bounds.x()));
      if (scenario.x_bounds.has_value()) {
        p.add_nonneg(AffineExpr(scenario.x_bounds->y()) - x_phys(i, k, 0));
        p.add_nonneg(x_phys(i, k, 0) - AffineExpr(scenario.x_bounds->x()));
      }
    }
  }

  // (f) linearized trigger constraints, softened by a penalized slack
  for (const Stc & stc : scenario.stcs) {
    for (int i = 0; i < kNumSegments; ++i) {
      for (int k = 0; k < K; ++k) {
        const Vec3 z_bar = ref[i].states[k].as_vector();
        const LinearizedStc lin = linearize(stc, z_bar);
        AffineExpr h_lin(lin.value);
        for (int j = 0; j < 3; ++j) {
          h_lin.add_term(lay.x(i, k, j), lin.gradient(j) * scaling.x_scale(j));
          h_lin.add_constant(lin.gradient(j) * (scaling.x_offset(j) - z_bar(j)));
        }
        const int slack = p.add_variable_block(1);
        lay.stc_slacks.push_back(slack);
        p.add_nonneg(AffineExpr::variable(slack));
        p.add_nonneg(AffineExpr::variable(slack) - h_lin);
        p.add_objective_term(slack, params.weights.nu);
      }
    }
  }

  // (g) hard per-knot trust region in scaled variables
  std::array<int, kNumSegments> sigma_step{};
  for (int i = 0; i < kNumSegments; ++i) {
    const double sigma_ref_hat = scaling.scale_sigma(ref[i].sigma);
    sigma_step[i] = p.add_abs_epigraph(
      AffineExpr::variable(lay.sigma_index[i]) - AffineExpr(sigma_ref_hat));
  }
  for (int i = 0; i < kNumSegments; ++i) {
    for (int k = 0; k < K; ++k) {
      const Vec3 x_ref_hat = scaling.scale_state(ref[i].states[k].as_vector());
      const Vec2 u_ref_hat = scaling.scale_control(ref[i].controls[k].as_vector());
      AffineExpr step_sum;
      for (int j = 0; j < 3; ++j) {
        const int t = p.add_abs_epigraph(xv(i, k, j) - AffineExpr(x_ref_hat(j)));
        step_sum += AffineExpr::variable(t);
      }
      for (int j = 0; j < 2; ++j) {
        const int t = p.add_abs_epigraph(uv(i, k, j) - AffineExpr(u_ref_hat(j)));
        step_sum += AffineExpr::variable(t);
      }
      step_sum += AffineExpr::variable(sigma_step[i]);
      p.add_nonneg(AffineExpr(trust_radius) - step_sum);
    }
  }

  // (h) time-dilation bounds
  for (int i = 0; i < kNumSegments; ++i) {
    AffineExpr sigma_phys(scaling.sigma_offset);
    sigma_phys.add_term(lay.sigma_index[i], scaling.sigma_scale);
    p.add_nonneg(AffineExpr(params.sigma_max) - sigma_phys);
    p.add_nonneg(sigma_phys - AffineExpr(params.sigma_min));
  }

  // (cost) jerk: one euclidean epigraph per segment and control channel
  if (params.weights.jerk > 0.0) {
    for (int i = 0; i < kNumSegments; ++i) {
      for (int c = 0; c < 2; ++c) {
        std::vector<AffineExpr> increments;
        increments.reserve(K - 1);
        for (int k = 0; k + 1 < K; ++k) {
          increments.push_back(uv(i, k + 1, c) - uv(i, k, c));
        }
        const int t = p.add_soc_epigraph(increments);
        p.add_objective_term(t, params.weights.jerk);
      }
    }
  }

  // (cost) path-length surrogate: l1 of scaled position increments
  if (params.weights.length > 0.0) {
    for (int i = 0; i < kNumSegments; ++i) {
      for (int k = 0; k + 1 < K; ++k) {
        for (int j = 0; j < 2; ++j) {
          const int t = p.add_abs_epigraph(xv(i, k + 1, j) - xv(i, k, j));
          p.add_objective_term(t, params.weights.length);
        }
      }
    }
  }

  lay.total_count = p.num_vars();
  return sub;
}

MultiSegmentSolution scvx_run(const Scenario & scenario, const ScvxParams & params)
{
  Scenario inst = scenario;
  inst.p1 = unwrap_goal_heading(scenario.p0, scenario.p1);

  const CarModel model(inst.model);
  const ScalingTransform scaling = make_scaling(scaling_bounds(inst, inst.p0, inst.p1));
  const int K = params.K;

  MultiSegmentSolution out;
  out.goal_used = inst.p1;
  out.segments = initialize_segments(inst.p0, inst.p1, params);
  double radius = params.trust.initial;

  CostBreakdown ref_cost = nonlinear_cost(out.segments, inst, params, scaling, model);

  for (int iter = 1; iter <= params.max_iters; ++iter) {
    out.iterations = iter;

    std::array<LtvSystem, kNumSegments> ltv;
    for (int i = 0; i < kNumSegments; ++i) {
      ltv[i] =
        apply_scaling(scaling, discretize_foh(out.segments[i], model, params.discretization));
    }
    Subproblem sub = build_subproblem(out.segments, ltv, inst, radius, scaling, params);
    const conic::ConicSolution sol = conic::solve(sub.problem);
    if (sol.status != conic::SolveStatus::optimal) {
      out.failure_reason = conic::to_string(sol.status);
      if (const char * dir = std::getenv("PARKPLAN_DUMP_SUBPROBLEM")) {
        std::ofstream dump(
          std::string(dir) + "/subproblem_iter" + std::to_string(iter) + ".json");
        dump << sub.problem.to_json().dump();
      }
      break;
    }
    const SubproblemLayout & lay = sub.layout;

    std::array<SegmentTrajectory, kNumSegments> cand;
    std::array<std::vector<Vec3>, kNumSegments> cand_nu;
    double nu_norm1 = 0.0;
    double stc_slack_norm1 = 0.0;
    double step_norm = 0.0;
    for (int i = 0; i < kNumSegments; ++i) {
      SegmentTrajectory & seg = cand[i];
      seg.K = K;
      seg.sigma = scaling.unscale_sigma(sol.v(lay.sigma_index[i]));
      seg.states.resize(K);
      seg.controls.resize(K);
      const double sigma_step =
        std::abs(sol.v(lay.sigma_index[i]) - scaling.scale_sigma(out.segments[i].sigma));
      for (int k = 0; k < K; ++k) {
        Vec3 x_hat{sol.v(lay.x(i, k, 0)), sol.v(lay.x(i, k, 1)), sol.v(lay.x(i, k, 2))};
        Vec2 u_hat{sol.v(lay.u(i, k, 0)), sol.v(lay.u(i, k, 1))};
        seg.states[k] = CarState::from_vector(scaling.unscale_state(x_hat));
        seg.controls[k] = CarControl::from_vector(scaling.unscale_control(u_hat));
        const Vec3 x_ref_hat = scaling.scale_state(out.segments[i].states[k].as_vector());
        const Vec2 u_ref_hat = scaling.scale_control(out.segments[i].controls[k].as_vector());
        const double knot_step =
          (x_hat - x_ref_hat).lpNorm<1>() + (u_hat - u_ref_hat).lpNorm<1>() + sigma_step;
        step_norm = std::max(step_norm, knot_step);
      }
      cand_nu[i].resize(K - 1);
      for (int k = 0; k + 1 < K; ++k) {
        const Vec3 nu{sol.v(lay.nu(i, k, 0)), sol.v(lay.nu(i, k, 1)), sol.v(lay.nu(i, k, 2))};
        cand_nu[i][k] = nu;
        nu_norm1 += nu.lpNorm<1>();
      }
    }
    for (int idx : lay.stc_slacks) {
      stc_slack_norm1 += std::abs(sol.v(idx));
    }

    const CostBreakdown cand_cost = nonlinear_cost(cand, inst, params, scaling, model);
    const double phi_ref = ref_cost.total(params.weights);
    const double phi_cand = cand_cost.total(params.weights);
    const double predicted = phi_ref - sol.objective_value;
    const double actual = phi_ref - phi_cand;

    IterationRecord rec;
    rec.iteration = iter;
    rec.cost_total = phi_cand;
    rec.cost_sigma = params.weights.sigma * cand_cost.sigma;
    rec.cost_jerk = params.weights.jerk * cand_cost.jerk;
    rec.cost_length = params.weights.length * cand_cost.length;
    rec.nu_norm1 = nu_norm1;
    rec.stc_slack_norm1 = stc_slack_norm1;
    rec.trust_radius = radius;
    rec.predicted_decrease = predicted;
    rec.actual_decrease = actual;
    rec.ratio = predicted > 0.0 ? actual / predicted : 0.0;
    rec.step_norm = step_norm;
    double sigma_total = 0.0;
    for (const SegmentTrajectory & seg : cand) {
      sigma_total += seg.sigma;
    }
    rec.sigma_total = sigma_total;

    const bool feasible = nu_norm1 < params.eps_nu && stc_slack_norm1 < params.eps_nu;
    if (step_norm < params.eps_step && feasible) {
      // The subproblem reproduces the reference; take the candidate only if
      // it does not worsen the penalized cost.
      rec.accepted = actual >= 0.0;
      if (rec.accepted) {
        out.segments = cand;
        out.virtual_controls = cand_nu;
      }
      out.history.push_back(rec);
      out.converged = true;
      break;
    }

    const TrustRegionDecision decision =
      trust_region_update(predicted, actual, radius, params.trust);
    rec.accepted = decision.accept;
    out.history.push_back(rec);
    if (decision.accept) {
      out.segments = cand;
      out.virtual_controls = cand_nu;
      ref_cost = cand_cost;
    }
    radius = decision.new_radius;
  }

  return out;
}

}  // namespace parkplan
