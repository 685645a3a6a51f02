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

// Word formulas follow the canonical curve families of Reeds and Shepp,
// evaluated in the R = 1 frame with the usual timeflip / reflect / reverse
// transforms generating the 48 types.

#include "parkplan/reeds_shepp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace parkplan
{
namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();
constexpr double kSampleEps = 1e-12;

double mod2pi(double x)
{
  double v = std::fmod(x, 2.0 * kPi);
  if (v < -kPi) {
    v += 2.0 * kPi;
  } else if (v > kPi) {
    v -= 2.0 * kPi;
  }
  return v;
}

void polar(double x, double y, double & r, double & theta)
{
  r = std::hypot(x, y);
  theta = std::atan2(y, x);
}

void tau_omega(double u, double v, double xi, double eta, double phi, double & tau,
               double & omega)
{
  const double delta = mod2pi(u - v);
  const double a = std::sin(u) - std::sin(delta);
  const double b = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = (t2 < 0.0) ? mod2pi(t1 + kPi) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

// Base-word solvers in the canonical frame; signed parameters encode the
// motion direction.

bool lp_sp_lp(double x, double y, double phi, double & t, double & u, double & v)
{
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kZero) {
    v = mod2pi(phi - t);
    if (v >= -kZero) {
      return true;
    }
  }
  return false;
}

bool lp_sp_rp(double x, double y, double phi, double & t, double & u, double & v)
{
  double t1 = 0.0, u1 = 0.0;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 >= 4.0) {
    u = std::sqrt(u1 - 4.0);
    const double theta = std::atan2(2.0, u);
    t = mod2pi(t1 + theta);
    v = mod2pi(t - phi);
    return t >= -kZero && v >= -kZero;
  }
  return false;
}

bool lp_rm_l(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double u1 = 0.0, theta = 0.0;
  polar(xi, eta, u1, theta);
  if (u1 <= 4.0) {
    u = -2.0 * std::asin(0.25 * u1);
    t = mod2pi(theta + 0.5 * u + kPi);
    v = mod2pi(phi - t + u);
    return t >= -kZero && u <= kZero;
  }
  return false;
}

bool lp_rup_lum_rm(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::hypot(xi, eta));
  if (rho <= 1.0) {
    u = std::acos(rho);
    tau_omega(u, -u, xi, eta, phi, t, v);
    return t >= -kZero && v <= kZero;
  }
  return false;
}

bool lp_rum_lum_rp(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho >= 0.0 && rho <= 1.0) {
    u = -std::acos(rho);
    if (u >= -0.5 * kPi) {
      tau_omega(u, u, xi, eta, phi, t, v);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

bool lp_rm_sm_lm(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double rho = 0.0, theta = 0.0;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    const double r = std::sqrt(rho * rho - 4.0);
    u = 2.0 - r;
    t = mod2pi(theta + std::atan2(r, -2.0));
    v = mod2pi(phi - 0.5 * kPi - t);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool lp_rm_sm_rm(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho = 0.0, theta = 0.0;
  polar(-eta, xi, rho, theta);
  if (rho >= 2.0) {
    t = theta;
    u = 2.0 - rho;
    v = mod2pi(t + 0.5 * kPi - phi);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool lp_rm_s_lm_rp(double x, double y, double phi, double & t, double & u, double & v)
{
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho = 0.0, theta = 0.0;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    u = 4.0 - std::sqrt(rho * rho - 4.0);
    if (u <= kZero) {
      t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
      v = mod2pi(t - phi);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

using SegSeq = std::vector<RsSegmentType>;

struct Candidate
{
  std::vector<RsPrimitive> word;
  double length = 0.0;
};

RsSegmentType reflect_type(RsSegmentType t)
{
  if (t == RsSegmentType::left) {
    return RsSegmentType::right;
  }
  if (t == RsSegmentType::right) {
    return RsSegmentType::left;
  }
  return RsSegmentType::straight;
}

/// Assembles a candidate from a type row and signed parameters, dropping
/// zero-length primitives.
Candidate make_candidate(const SegSeq & types, const std::vector<double> & params)
{
  Candidate c;
  for (size_t i = 0; i < types.size(); ++i) {
    const double p = params[i];
    if (std::abs(p) < kZero) {
      continue;
    }
    c.word.push_back({types[i], p >= 0.0 ? 1 : -1, std::abs(p)});
    c.length += std::abs(p);
  }
  return c;
}

struct Solver
{
  double x, y, phi;
  std::vector<Candidate> candidates;

  void add(const SegSeq & types, std::vector<double> params, bool timeflip, bool reflect,
           bool reverse)
  {
    SegSeq tt = types;
    if (reflect) {
      for (auto & s : tt) {
        s = reflect_type(s);
      }
    }
    if (timeflip) {
      for (auto & p : params) {
        p = -p;
      }
    }
    if (reverse) {
      std::reverse(tt.begin(), tt.end());
      std::reverse(params.begin(), params.end());
    }
    candidates.push_back(make_candidate(tt, params));
  }

  /// Runs one base solver under the four sign transforms (and optionally the
  /// reversed word) and collects every solution. The builder maps the free
  /// parameters (t, u, v) to the signed parameter row of the word.
  template <typename Fn, typename Builder>
  void try_family(Fn && fn, const SegSeq & types, bool with_reverse, Builder && builder)
  {
    const double xb = x * std::cos(phi) + y * std::sin(phi);
    const double yb = x * std::sin(phi) - y * std::cos(phi);
    struct Variant
    {
      double x, y, phi;
      bool timeflip, reflect, reverse;
    };
    std::vector<Variant> variants = {
      {x, y, phi, false, false, false},
      {-x, y, -phi, true, false, false},
      {x, -y, -phi, false, true, false},
      {-x, -y, phi, true, true, false},
    };
    if (with_reverse) {
      variants.push_back({xb, yb, phi, false, false, true});
      variants.push_back({-xb, yb, -phi, true, false, true});
      variants.push_back({xb, -yb, -phi, false, true, true});
      variants.push_back({-xb, -yb, phi, true, true, true});
    }
    for (const Variant & va : variants) {
      double t = 0.0, u = 0.0, v = 0.0;
      if (fn(va.x, va.y, va.phi, t, u, v)) {
        add(types, builder(t, u, v), va.timeflip, va.reflect, va.reverse);
      }
    }
  }
};

std::vector<Candidate> enumerate_words(double x, double y, double phi)
{
  using T = RsSegmentType;
  Solver s{x, y, phi, {}};

  auto tuv = [](double t, double u, double v) { return std::vector<double>{t, u, v}; };

  // CSC
  s.try_family(lp_sp_lp, {T::left, T::straight, T::left}, false, tuv);
  s.try_family(lp_sp_rp, {T::left, T::straight, T::right}, false, tuv);
  // CCC (the reversed variants cover the asymmetric C C|C words)
  s.try_family(lp_rm_l, {T::left, T::right, T::left}, true, tuv);
  // CCCC
  s.try_family(lp_rup_lum_rm, {T::left, T::right, T::left, T::right}, false,
               [](double t, double u, double v) {
                 return std::vector<double>{t, u, -u, v};
               });
  s.try_family(lp_rum_lum_rp, {T::left, T::right, T::left, T::right}, false,
               [](double t, double u, double v) {
                 return std::vector<double>{t, u, u, v};
               });
  // CCSC (quarter-turn middle arc)
  auto quarter = [](double t, double u, double v) {
    return std::vector<double>{t, -0.5 * kPi, u, v};
  };
  s.try_family(lp_rm_sm_lm, {T::left, T::right, T::straight, T::left}, true, quarter);
  s.try_family(lp_rm_sm_rm, {T::left, T::right, T::straight, T::right}, true, quarter);
  // CCSCC
  s.try_family(lp_rm_s_lm_rp, {T::left, T::right, T::straight, T::left, T::right}, false,
               [](double t, double u, double v) {
                 return std::vector<double>{t, -0.5 * kPi, u, -0.5 * kPi, v};
               });
  return std::move(s.candidates);
}

/// Advances a pose by one primitive in the normalized (R = 1) frame.
Vec3 advance(const Vec3 & pose, const RsPrimitive & prim, double fraction)
{
  const double arc = prim.direction * prim.param * fraction;
  const double theta = pose(2);
  Vec3 out = pose;
  switch (prim.type) {
    case RsSegmentType::straight:
      out(0) += arc * std::cos(theta);
      out(1) += arc * std::sin(theta);
      break;
    case RsSegmentType::left:
      out(0) += std::sin(theta + arc) - std::sin(theta);
      out(1) -= std::cos(theta + arc) - std::cos(theta);
      out(2) += arc;
      break;
    case RsSegmentType::right:
      out(0) -= std::sin(theta - arc) - std::sin(theta);
      out(1) += std::cos(theta - arc) - std::cos(theta);
      out(2) -= arc;
      break;
  }
  return out;
}

Vec3 word_endpoint(const std::vector<RsPrimitive> & word)
{
  Vec3 pose = Vec3::Zero();
  for (const RsPrimitive & prim : word) {
    pose = advance(pose, prim, 1.0);
  }
  return pose;
}

bool reaches_target(const Candidate & c, double x, double y, double phi)
{
  const Vec3 end = word_endpoint(c.word);
  return std::abs(end(0) - x) < 1e-8 && std::abs(end(1) - y) < 1e-8 &&
         std::abs(mod2pi(end(2) - phi)) < 1e-8;
}

int type_rank(RsSegmentType t)
{
  switch (t) {
    case RsSegmentType::left:
      return 0;
    case RsSegmentType::straight:
      return 1;
    case RsSegmentType::right:
      return 2;
  }
  return 3;
}

bool word_less(const std::vector<RsPrimitive> & a, const std::vector<RsPrimitive> & b)
{
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    const int ra = 2 * type_rank(a[i].type) + (a[i].direction < 0 ? 1 : 0);
    const int rb = 2 * type_rank(b[i].type) + (b[i].direction < 0 ? 1 : 0);
    if (ra != rb) {
      return ra < rb;
    }
    if (a[i].param != b[i].param) {
      return a[i].param < b[i].param;
    }
  }
  return a.size() < b.size();
}

}  // namespace

std::string RsPath::word_string() const
{
  std::string out;
  for (const RsPrimitive & p : word) {
    switch (p.type) {
      case RsSegmentType::left:
        out += 'L';
        break;
      case RsSegmentType::straight:
        out += 'S';
        break;
      case RsSegmentType::right:
        out += 'R';
        break;
    }
    out += p.direction >= 0 ? '+' : '-';
  }
  return out;
}

RsPath shortest_path(const CarState & q0, const CarState & q1, double R)
{
  if (!(R > 0.0)) {
    throw std::invalid_argument("shortest_path: R must be positive");
  }
  // Normalize: move q0 to the origin, align its heading, scale by 1/R.
  const double dx = (q1.x_w - q0.x_w) / R;
  const double dy = (q1.y_w - q0.y_w) / R;
  const double c = std::cos(q0.theta);
  const double s = std::sin(q0.theta);
  const double x = c * dx + s * dy;
  const double y = -s * dx + c * dy;
  const double phi = mod2pi(q1.theta - q0.theta);

  std::vector<Candidate> candidates = enumerate_words(x, y, phi);

  const Candidate * best = nullptr;
  for (const Candidate & cand : candidates) {
    if (!reaches_target(cand, x, y, phi)) {
      continue;
    }
    if (best == nullptr || cand.length < best->length - kZero ||
        (std::abs(cand.length - best->length) <= kZero &&
         word_less(cand.word, best->word))) {
      best = &cand;
    }
  }
  if (best == nullptr) {
    // The zero-distance case: empty word.
    if (std::hypot(x, y) < 1e-12 && std::abs(phi) < 1e-12) {
      return {};
    }
    throw std::runtime_error("shortest_path: no valid word found");
  }
  RsPath path;
  path.word = best->word;
  path.total_length = best->length;
  return path;
}

std::vector<CarState> sample(const RsPath & path, const CarState & q0, double R, double ds)
{
  if (!(ds > 0.0)) {
    throw std::invalid_argument("sample: ds must be positive");
  }

  auto scaled_advance = [&](const Vec3 & p, const RsPrimitive & prim, double fraction) {
    Vec3 unit{p(0) / R, p(1) / R, p(2)};
    unit = advance(unit, prim, fraction);
    return Vec3{unit(0) * R, unit(1) * R, unit(2)};
  };

  auto pose_at = [&](double arc) {
    Vec3 pose = q0.as_vector();
    double remaining = arc;
    for (const RsPrimitive & prim : path.word) {
      const double seg_len = prim.param * R;
      if (remaining >= seg_len) {
        pose = scaled_advance(pose, prim, 1.0);
        remaining -= seg_len;
      } else {
        if (seg_len > 0.0) {
          pose = scaled_advance(pose, prim, remaining / seg_len);
        }
        break;
      }
    }
    return pose;
  };

  const double total = path.total_length * R;
  std::vector<CarState> poses;
  for (double s = 0.0; s < total - kSampleEps; s += ds) {
    poses.push_back(CarState::from_vector(pose_at(s)));
  }
  poses.push_back(CarState::from_vector(pose_at(total)));
  return poses;
}

}  // namespace parkplan
