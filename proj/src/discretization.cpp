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

#include "parkplan/discretization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace parkplan
{

std::pair<double, double> foh_coefficients(double tau, double tau_k, double tau_k1)
{
  if (!(tau_k < tau_k1)) {
    throw std::invalid_argument("foh_coefficients: degenerate interval");
  }
  const double width = tau_k1 - tau_k;
  const double lambda_plus = (tau - tau_k) / width;
  return {1.0 - lambda_plus, lambda_plus};
}

namespace
{

/// Joint integration state over one interval: reference state, fundamental
/// matrix and its inverse, and the accumulated input/defect integrals in
/// Phi^{-1} form.
struct JointState
{
  Vec3 x = Vec3::Zero();
  Mat3 phi = Mat3::Identity();
  Mat3 psi = Mat3::Identity();
  Mat32 pbm = Mat32::Zero();
  Mat32 pbp = Mat32::Zero();
  Vec3 ps = Vec3::Zero();
  Vec3 pw = Vec3::Zero();

  JointState & axpy(double a, const JointState & d)
  {
    x += a * d.x;
    phi += a * d.phi;
    psi += a * d.psi;
    pbm += a * d.pbm;
    pbp += a * d.pbp;
    ps += a * d.ps;
    pw += a * d.pw;
    return *this;
  }
};

JointState derivative(
  const JointState & s, double tau, double tau_k, double tau_k1, const Vec2 & u_k,
  const Vec2 & u_k1, double sigma, const DynamicsModel & model)
{
  const auto [lm, lp] = foh_coefficients(tau, tau_k, tau_k1);
  const Vec2 u = lm * u_k + lp * u_k1;
  const LinearizedDynamics lin = model.linearize(s.x, u, sigma);

  JointState d;
  d.x = model.derivative(s.x, u, sigma);
  d.phi = lin.A * s.phi;
  d.psi = -s.psi * lin.A;
  d.pbm = s.psi * lin.B * lm;
  d.pbp = s.psi * lin.B * lp;
  d.ps = s.psi * lin.S;
  d.pw = s.psi * lin.w;
  return d;
}

bool all_finite(const JointState & s)
{
  return s.x.allFinite() && s.phi.allFinite() && s.psi.allFinite() && s.pbm.allFinite() &&
         s.pbp.allFinite() && s.ps.allFinite() && s.pw.allFinite();
}

}  // namespace

LtvSystem discretize_foh(
  const SegmentTrajectory & ref_traj, const DynamicsModel & model,
  const DiscretizationOptions & opts)
{
  const int K = ref_traj.K;
  if (K < 2 || static_cast<int>(ref_traj.states.size()) != K ||
      static_cast<int>(ref_traj.controls.size()) != K) {
    throw std::invalid_argument("discretize_foh: trajectory needs K >= 2 consistent knots");
  }
  if (!(ref_traj.sigma > 0.0)) {
    throw std::invalid_argument("discretize_foh: sigma must be positive");
  }

  LtvSystem sys;
  sys.K = K;
  sys.A.resize(K - 1);
  sys.B_minus.resize(K - 1);
  sys.B_plus.resize(K - 1);
  sys.S.resize(K - 1);
  sys.w.resize(K - 1);

  const double dtau = 1.0 / (K - 1);
  const int substeps = std::max(1, opts.rk4_substeps);
  const double h = dtau / substeps;

  for (int k = 0; k < K - 1; ++k) {
    const double tau_k = k * dtau;
    const double tau_k1 = (k + 1) * dtau;
    const Vec2 u_k = ref_traj.controls[k].as_vector();
    const Vec2 u_k1 = ref_traj.controls[k + 1].as_vector();

    JointState s;
    s.x = ref_traj.states[k].as_vector();

    auto f = [&](const JointState & state, double tau) {
      return derivative(state, tau, tau_k, tau_k1, u_k, u_k1, ref_traj.sigma, model);
    };

    for (int i = 0; i < substeps; ++i) {
      const double t0 = tau_k + i * h;
      const JointState k1 = f(s, t0);
      const JointState k2 = f(JointState(s).axpy(0.5 * h, k1), t0 + 0.5 * h);
      const JointState k3 = f(JointState(s).axpy(0.5 * h, k2), t0 + 0.5 * h);
      const JointState k4 = f(JointState(s).axpy(h, k3), t0 + h);
      s.axpy(h / 6.0, k1).axpy(h / 3.0, k2).axpy(h / 3.0, k3).axpy(h / 6.0, k4);
    }

    if (!all_finite(s)) {
      throw std::runtime_error(
        "discretize_foh: non-finite integration result in interval " + std::to_string(k));
    }

    sys.A[k] = s.phi;
    sys.B_minus[k] = s.phi * s.pbm;
    sys.B_plus[k] = s.phi * s.pbp;
    sys.S[k] = s.phi * s.ps;
    sys.w[k] = s.phi * s.pw;
  }
  return sys;
}

ScalingTransform make_scaling(const Bounds & bounds)
{
  ScalingTransform t;
  for (int i = 0; i < 3; ++i) {
    if (!(bounds.x_max(i) > bounds.x_min(i))) {
      throw std::invalid_argument("make_scaling: state range must have positive width");
    }
    t.x_scale(i) = 0.5 * (bounds.x_max(i) - bounds.x_min(i));
    t.x_offset(i) = 0.5 * (bounds.x_max(i) + bounds.x_min(i));
  }
  for (int i = 0; i < 2; ++i) {
    if (!(bounds.u_max(i) > bounds.u_min(i))) {
      throw std::invalid_argument("make_scaling: control range must have positive width");
    }
    t.u_scale(i) = 0.5 * (bounds.u_max(i) - bounds.u_min(i));
    t.u_offset(i) = 0.5 * (bounds.u_max(i) + bounds.u_min(i));
  }
  if (!(bounds.sigma_max > bounds.sigma_min)) {
    throw std::invalid_argument("make_scaling: sigma range must have positive width");
  }
  t.sigma_scale = 0.5 * (bounds.sigma_max - bounds.sigma_min);
  t.sigma_offset = 0.5 * (bounds.sigma_max + bounds.sigma_min);
  return t;
}

LtvSystem apply_scaling(const ScalingTransform & t, const LtvSystem & sys)
{
  const Mat3 dx = t.x_scale.asDiagonal();
  const Mat3 dx_inv = t.x_scale.cwiseInverse().asDiagonal();
  const Eigen::Matrix2d du = t.u_scale.asDiagonal();

  LtvSystem scaled;
  scaled.K = sys.K;
  scaled.A.resize(sys.A.size());
  scaled.B_minus.resize(sys.A.size());
  scaled.B_plus.resize(sys.A.size());
  scaled.S.resize(sys.A.size());
  scaled.w.resize(sys.A.size());
  for (size_t k = 0; k < sys.A.size(); ++k) {
    scaled.A[k] = dx_inv * sys.A[k] * dx;
    scaled.B_minus[k] = dx_inv * sys.B_minus[k] * du;
    scaled.B_plus[k] = dx_inv * sys.B_plus[k] * du;
    scaled.S[k] = t.sigma_scale * (dx_inv * sys.S[k]);
    scaled.w[k] =
      dx_inv * (sys.A[k] * t.x_offset + (sys.B_minus[k] + sys.B_plus[k]) * t.u_offset +
                sys.S[k] * t.sigma_offset + sys.w[k] - t.x_offset);
  }
  return scaled;
}

}  // namespace parkplan
