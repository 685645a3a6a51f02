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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "parkplan/conic.hpp"

namespace parkplan::conic
{
namespace
{

constexpr double kStepMin = 1e-6;
constexpr double kStepMax = 0.999;
constexpr double kStepDamping = 0.99;
constexpr double kSigmaMin = 1e-4;
constexpr double kSigmaMax = 0.7;
constexpr double kSafeguard = 500.0;
constexpr double kLinSysAcc = 1e-14;
constexpr double kRefineStopFactor = 6.0;

/// Problem data in standard conic form:
///   min c'x  s.t.  A x = b,  G x + s = h,  s in (R+)^l x SOC(q_1) x ...
struct StandardForm
{
  int n = 0;
  int p = 0;
  int m = 0;
  int l = 0;
  std::vector<int> soc_dims;
  Eigen::VectorXd c;
  Eigen::VectorXd b;
  Eigen::VectorXd h;
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> G;
};

void append_cone_row(
  const AffineExpr & e, int row, std::vector<Eigen::Triplet<double>> & g_triplets,
  Eigen::VectorXd & h)
{
  for (const AffineTerm & t : e.terms()) {
    g_triplets.emplace_back(row, t.index, -t.coeff);
  }
  h(row) = e.constant();
}

StandardForm build_standard_form(const ConicProblem & prob)
{
  StandardForm sf;
  sf.n = prob.num_vars();
  sf.p = static_cast<int>(prob.equalities().size());
  sf.l = static_cast<int>(prob.nonneg_cones().size());

  int m = sf.l;
  for (const SocConstraint & c : prob.soc_cones()) {
    const int dim = static_cast<int>(c.y.size()) + 1;
    sf.soc_dims.push_back(dim);
    m += dim;
  }
  // The embedding needs a nonempty cone; pad with the trivial row s = 1.
  bool pad = (m == 0);
  if (pad) {
    sf.l = 1;
    m = 1;
  }
  sf.m = m;

  sf.c = Eigen::VectorXd::Zero(sf.n);
  for (int i = 0; i < sf.n; ++i) {
    sf.c(i) = prob.objective()[i];
  }

  sf.b = Eigen::VectorXd::Zero(sf.p);
  std::vector<Eigen::Triplet<double>> a_triplets;
  for (int r = 0; r < sf.p; ++r) {
    const AffineExpr & e = prob.equalities()[r];
    for (const AffineTerm & t : e.terms()) {
      a_triplets.emplace_back(r, t.index, t.coeff);
    }
    sf.b(r) = -e.constant();
  }
  sf.A.resize(sf.p, sf.n);
  sf.A.setFromTriplets(a_triplets.begin(), a_triplets.end());

  sf.h = Eigen::VectorXd::Zero(sf.m);
  std::vector<Eigen::Triplet<double>> g_triplets;
  if (pad) {
    sf.h(0) = 1.0;
  } else {
    int row = 0;
    for (const AffineExpr & e : prob.nonneg_cones()) {
      append_cone_row(e, row++, g_triplets, sf.h);
    }
    for (const SocConstraint & c : prob.soc_cones()) {
      append_cone_row(c.t, row++, g_triplets, sf.h);
      for (const AffineExpr & e : c.y) {
        append_cone_row(e, row++, g_triplets, sf.h);
      }
    }
  }
  sf.G.resize(sf.m, sf.n);
  sf.G.setFromTriplets(g_triplets.begin(), g_triplets.end());
  sf.A.makeCompressed();
  sf.G.makeCompressed();
  return sf;
}

/// Nesterov-Todd scaling state for one second-order cone, in the expanded
/// low-rank form Wbar^2 = diag(d1, I) + u u' - v v' used for the KKT matrix,
/// with u = (u0, u1 q) and v = (0, v1 q).
struct SocScaling
{
  double eta_sq = 1.0;
  double a = 1.0;
  Eigen::VectorXd q;
  double d1 = 1.0;
  double u0 = 0.0;
  double u1 = 0.0;
  double v1 = 0.0;
};

enum class ExitReason
{
  none,
  optimal,
  optimal_inaccurate,
  primal_infeasible,
  dual_infeasible,
  max_iters,
  numerics,
};

struct Iterate
{
  Eigen::VectorXd x, y, z, s, lambda;
  double tau = 1.0;
  double kap = 1.0;
  double gap = 0.0;
  double mu = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  double pcost = 0.0;
  double dcost = 0.0;
  std::optional<double> relgap;
  std::optional<double> pinfres;
  std::optional<double> dinfres;
  int iter = 0;

  bool better_than(const Iterate & o) const
  {
    return std::max({pres, dres, gap}) < std::max({o.pres, o.dres, o.gap});
  }
};

class IpmSolver
{
public:
  IpmSolver(StandardForm sf, const SolverSettings & settings)
  : sf_(std::move(sf)), opts_(settings), delta_(settings.static_reg)
  {
    raw_ = sf_;
    equilibrate();
    at_ = sf_.A.transpose();
    gt_ = sf_.G.transpose();
    // The z block is expanded by two auxiliary rows per second-order cone so
    // the scaling enters the KKT matrix in low-rank form.
    m_expanded_ = sf_.m + 2 * static_cast<int>(sf_.soc_dims.size());
    dim_ = sf_.n + sf_.p + m_expanded_;
    z_map_.resize(sf_.m);
    for (int i = 0; i < sf_.l; ++i) {
      z_map_[i] = i;
    }
    int row = sf_.l, expanded = sf_.l;
    for (int d : sf_.soc_dims) {
      for (int i = 0; i < d; ++i) {
        z_map_[row++] = expanded++;
      }
      expanded += 2;
    }
    lp_w_sq_ = Eigen::VectorXd::Ones(sf_.l);
    soc_.resize(sf_.soc_dims.size());
    for (size_t j = 0; j < soc_.size(); ++j) {
      const int d = sf_.soc_dims[j];
      soc_[j].q = Eigen::VectorXd::Zero(d - 1);
    }
    cone_degree_ = sf_.l + static_cast<int>(sf_.soc_dims.size());
  }

  ConicSolution run();

private:
  void assemble_kkt();
  bool factorize();
  int solve_kkt(const Eigen::VectorXd & rhs, Eigen::VectorXd & sol) const;
  void split(const Eigen::VectorXd & sol, Eigen::VectorXd & dx, Eigen::VectorXd & dy,
             Eigen::VectorXd & dz) const;
  bool update_scalings(const Eigen::VectorXd & s, const Eigen::VectorXd & z);
  void scale(const Eigen::VectorXd & z, Eigen::VectorXd & lambda) const;
  void conic_product(const Eigen::VectorXd & u, const Eigen::VectorXd & v,
                     Eigen::VectorXd & w) const;
  void conic_division(const Eigen::VectorXd & u, const Eigen::VectorXd & w,
                      Eigen::VectorXd & v) const;
  double line_search(const Eigen::VectorXd & lambda, const Eigen::VectorXd & ds,
                     const Eigen::VectorXd & dz, double tau, double dtau, double kap,
                     double dkap) const;
  void bring_to_cone(const Eigen::VectorXd & r, Eigen::VectorXd & s) const;
  void compute_residuals();
  void update_statistics();
  ExitReason check_exit(bool reduced_accuracy) const;
  ConicSolution finish(ExitReason reason) const;
  void equilibrate();

  StandardForm sf_;
  StandardForm raw_;  // original data for final certification
  Eigen::VectorXd equil_x_, equil_a_, equil_g_;
  int m_expanded_ = 0;
  std::vector<int> z_map_;     // collapsed cone row -> expanded KKT row
  Eigen::VectorXd reg_sign_;   // sign of the static regularization per row
  SolverSettings opts_;
  double delta_;
  Eigen::SparseMatrix<double> at_, gt_;
  int dim_ = 0;
  int cone_degree_ = 0;

  Eigen::VectorXd lp_w_sq_;
  std::vector<SocScaling> soc_;

  Eigen::SparseMatrix<double> kkt_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool pattern_analyzed_ = false;

  Iterate w_;
  Iterate best_;

  // residual workspace
  Eigen::VectorXd rx_, ry_, rz_;
  double rt_ = 0.0;
  double hresx_ = 0.0, hresy_ = 0.0, hresz_ = 0.0;
  double nx_ = 0.0, ny_ = 0.0, nz_ = 0.0, ns_ = 0.0;
  double cx_ = 0.0, by_ = 0.0, hz_ = 0.0;
  double resx0_ = 1.0, resy0_ = 1.0, resz0_ = 1.0;
};

void IpmSolver::equilibrate()
{
  const int n = sf_.n, p = sf_.p, m = sf_.m;
  equil_x_ = Eigen::VectorXd::Ones(n);
  equil_a_ = Eigen::VectorXd::Ones(p);
  equil_g_ = Eigen::VectorXd::Ones(m);

  auto max_cols = [](Eigen::VectorXd & acc, const Eigen::SparseMatrix<double> & mat) {
    for (int k = 0; k < mat.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it) {
        acc(it.col()) = std::max(acc(it.col()), std::abs(it.value()));
      }
    }
  };
  auto max_rows = [](Eigen::VectorXd & acc, const Eigen::SparseMatrix<double> & mat) {
    for (int k = 0; k < mat.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it) {
        acc(it.row()) = std::max(acc(it.row()), std::abs(it.value()));
      }
    }
  };
  auto scale_rows = [](const Eigen::VectorXd & d, Eigen::SparseMatrix<double> & mat) {
    for (int k = 0; k < mat.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it) {
        it.valueRef() /= d(it.row());
      }
    }
  };
  auto scale_cols = [](const Eigen::VectorXd & d, Eigen::SparseMatrix<double> & mat) {
    for (int k = 0; k < mat.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it) {
        it.valueRef() /= d(it.col());
      }
    }
  };
  auto sqrt_or_one = [](double v) { return std::abs(v) < 1e-6 ? 1.0 : std::sqrt(v); };

  for (int pass = 0; pass < 3; ++pass) {
    Eigen::VectorXd ex = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ea = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd eg = Eigen::VectorXd::Zero(m);
    max_cols(ex, sf_.A);
    max_cols(ex, sf_.G);
    max_rows(ea, sf_.A);
    max_rows(eg, sf_.G);

    // One shared factor per second-order cone keeps its geometry intact.
    int off = sf_.l;
    for (int d : sf_.soc_dims) {
      const double total = eg.segment(off, d).sum();
      eg.segment(off, d).setConstant(total);
      off += d;
    }

    ex = ex.unaryExpr(sqrt_or_one);
    ea = ea.unaryExpr(sqrt_or_one);
    eg = eg.unaryExpr(sqrt_or_one);

    scale_rows(ea, sf_.A);
    scale_rows(eg, sf_.G);
    scale_cols(ex, sf_.A);
    scale_cols(ex, sf_.G);

    equil_x_ = equil_x_.cwiseProduct(ex);
    equil_a_ = equil_a_.cwiseProduct(ea);
    equil_g_ = equil_g_.cwiseProduct(eg);
  }

  sf_.c = sf_.c.cwiseQuotient(equil_x_);
  sf_.b = sf_.b.cwiseQuotient(equil_a_);
  sf_.h = sf_.h.cwiseQuotient(equil_g_);
}

void IpmSolver::assemble_kkt()
{
  std::vector<Eigen::Triplet<double>> trips;
  const int n = sf_.n, p = sf_.p;
  reg_sign_ = Eigen::VectorXd::Zero(dim_);
  auto sym = [&](int i, int j, double v) {
    trips.emplace_back(i, j, v);
    if (i != j) {
      trips.emplace_back(j, i, v);
    }
  };
  for (int i = 0; i < n; ++i) {
    sym(i, i, delta_);
    reg_sign_(i) = 1.0;
  }
  for (int k = 0; k < at_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(at_, k); it; ++it) {
      sym(static_cast<int>(it.row()), n + k, it.value());
    }
  }
  for (int r = 0; r < p; ++r) {
    sym(n + r, n + r, -delta_);
    reg_sign_(n + r) = -1.0;
  }
  for (int k = 0; k < gt_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(gt_, k); it; ++it) {
      sym(static_cast<int>(it.row()), n + p + z_map_[k], it.value());
    }
  }
  const int z0 = n + p;
  for (int i = 0; i < sf_.l; ++i) {
    sym(z0 + i, z0 + i, -lp_w_sq_(i) - delta_);
    reg_sign_(z0 + i) = -1.0;
  }
  int row = z0 + sf_.l;
  for (size_t j = 0; j < soc_.size(); ++j) {
    const SocScaling & sc = soc_[j];
    const int d = sf_.soc_dims[j];
    // cone rows: -eta^2 diag(d1, I)
    sym(row, row, -sc.eta_sq * sc.d1 - delta_);
    reg_sign_(row) = -1.0;
    for (int k = 1; k < d; ++k) {
      sym(row + k, row + k, -sc.eta_sq - delta_);
      reg_sign_(row + k) = -1.0;
    }
    // first auxiliary row: v coupling, Schur complement +eta^2 v v'
    const int av = row + d;
    sym(av, av, -sc.eta_sq);
    for (int k = 1; k < d; ++k) {
      sym(row + k, av, -sc.eta_sq * sc.v1 * sc.q(k - 1));
    }
    // second auxiliary row: u coupling, Schur complement -eta^2 u u'
    const int au = row + d + 1;
    sym(au, au, sc.eta_sq + delta_);
    reg_sign_(au) = 1.0;
    sym(row, au, -sc.eta_sq * sc.u0);
    for (int k = 1; k < d; ++k) {
      sym(row + k, au, -sc.eta_sq * sc.u1 * sc.q(k - 1));
    }
    row += d + 2;
  }
  kkt_.resize(dim_, dim_);
  kkt_.setFromTriplets(trips.begin(), trips.end());
  kkt_.makeCompressed();
}

bool IpmSolver::factorize()
{
  assemble_kkt();
  if (!pattern_analyzed_) {
    lu_.analyzePattern(kkt_);
    pattern_analyzed_ = true;
  }
  lu_.factorize(kkt_);
  if (lu_.info() == Eigen::Success) {
    return true;
  }
  // Retry with heavier regularization before giving up.
  for (int bump = 0; bump < 3; ++bump) {
    delta_ *= 100.0;
    assemble_kkt();
    lu_.factorize(kkt_);
    if (lu_.info() == Eigen::Success) {
      return true;
    }
  }
  return false;
}

int IpmSolver::solve_kkt(const Eigen::VectorXd & rhs, Eigen::VectorXd & sol) const
{
  // Refinement targets the unregularized KKT matrix, so the static
  // regularization perturbation is corrected instead of baked in.
  auto true_residual = [&](const Eigen::VectorXd & x) {
    Eigen::VectorXd err = rhs - kkt_ * x;
    err += delta_ * reg_sign_.cwiseProduct(x);
    return err;
  };

  sol = lu_.solve(rhs);
  const double threshold = (1.0 + rhs.lpNorm<Eigen::Infinity>()) * kLinSysAcc;
  double prev_err = std::numeric_limits<double>::max();
  Eigen::VectorXd correction;
  int k = 0;
  for (; k <= opts_.refine_iters; ++k) {
    const Eigen::VectorXd err = true_residual(sol);
    const double nerr = err.lpNorm<Eigen::Infinity>();
    if (k > 0 && nerr > prev_err) {
      sol -= correction;
      break;
    }
    if (k == opts_.refine_iters || nerr < threshold ||
        (k > 0 && prev_err < kRefineStopFactor * nerr)) {
      break;
    }
    prev_err = nerr;
    correction = lu_.solve(err);
    sol += correction;
  }
  return k;
}

void IpmSolver::split(const Eigen::VectorXd & sol, Eigen::VectorXd & dx, Eigen::VectorXd & dy,
                      Eigen::VectorXd & dz) const
{
  dx = sol.head(sf_.n);
  dy = sol.segment(sf_.n, sf_.p);
  dz.resize(sf_.m);
  for (int i = 0; i < sf_.m; ++i) {
    dz(i) = sol(sf_.n + sf_.p + z_map_[i]);
  }
}

bool IpmSolver::update_scalings(const Eigen::VectorXd & s, const Eigen::VectorXd & z)
{
  for (int i = 0; i < sf_.l; ++i) {
    if (s(i) <= 0.0 || z(i) <= 0.0) {
      return false;
    }
    lp_w_sq_(i) = s(i) / z(i);
  }
  int off = sf_.l;
  for (size_t j = 0; j < soc_.size(); ++j) {
    SocScaling & sc = soc_[j];
    const int d = sf_.soc_dims[j];
    const double sres = s(off) * s(off) - s.segment(off + 1, d - 1).squaredNorm();
    const double zres = z(off) * z(off) - z.segment(off + 1, d - 1).squaredNorm();
    if (sres <= 0.0 || zres <= 0.0) {
      return false;
    }
    const double snorm = std::sqrt(sres);
    const double znorm = std::sqrt(zres);
    const Eigen::VectorXd sbar = s.segment(off, d) / snorm;
    const Eigen::VectorXd zbar = z.segment(off, d) / znorm;
    sc.eta_sq = snorm / znorm;
    const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    sc.a = (0.5 / gamma) * (sbar(0) + zbar(0));
    sc.q = (0.5 / gamma) * (sbar.tail(d - 1) - zbar.tail(d - 1));

    // Low-rank split of Wbar^2 for the expanded KKT block.
    const double w = sc.q.squaredNorm();
    const double cc = (1.0 + sc.a) + w / (1.0 + sc.a);
    const double dd = 1.0 + 2.0 / (1.0 + sc.a) + w / std::pow(1.0 + sc.a, 2);
    const double d1 = std::max(
      0.0, 0.5 * (sc.a * sc.a + w * (1.0 - (cc * cc) / (1.0 + w * dd))));
    const double u0_sq = sc.a * sc.a + w - d1;
    const double c_by_u0_sq = (cc * cc) / u0_sq;
    if (c_by_u0_sq - dd <= 0.0) {
      return false;
    }
    sc.d1 = d1;
    sc.u0 = std::sqrt(u0_sq);
    sc.u1 = std::sqrt(c_by_u0_sq);
    sc.v1 = std::sqrt(c_by_u0_sq - dd);
    off += d;
  }
  return true;
}

void IpmSolver::scale(const Eigen::VectorXd & z, Eigen::VectorXd & lambda) const
{
  lambda.resize(sf_.m);
  lambda.head(sf_.l) = lp_w_sq_.cwiseSqrt().cwiseProduct(z.head(sf_.l));
  int off = sf_.l;
  for (size_t j = 0; j < soc_.size(); ++j) {
    const SocScaling & sc = soc_[j];
    const int d = sf_.soc_dims[j];
    const double eta = std::sqrt(sc.eta_sq);
    const double zeta = sc.q.dot(z.segment(off + 1, d - 1));
    const double factor = z(off) + zeta / (1.0 + sc.a);
    lambda(off) = eta * (sc.a * z(off) + zeta);
    lambda.segment(off + 1, d - 1) = eta * (z.segment(off + 1, d - 1) + factor * sc.q);
    off += d;
  }
}

void IpmSolver::conic_product(const Eigen::VectorXd & u, const Eigen::VectorXd & v,
                              Eigen::VectorXd & w) const
{
  w.resize(sf_.m);
  w.head(sf_.l) = u.head(sf_.l).cwiseProduct(v.head(sf_.l));
  int off = sf_.l;
  for (int d : sf_.soc_dims) {
    w(off) = u.segment(off, d).dot(v.segment(off, d));
    w.segment(off + 1, d - 1) =
      u(off) * v.segment(off + 1, d - 1) + v(off) * u.segment(off + 1, d - 1);
    off += d;
  }
}

void IpmSolver::conic_division(const Eigen::VectorXd & u, const Eigen::VectorXd & w,
                               Eigen::VectorXd & v) const
{
  v.resize(sf_.m);
  v.head(sf_.l) = w.head(sf_.l).cwiseQuotient(u.head(sf_.l));
  int off = sf_.l;
  for (int d : sf_.soc_dims) {
    const double u0 = u(off);
    const double w0 = w(off);
    const double rho = u0 * u0 - u.segment(off + 1, d - 1).squaredNorm();
    const double zeta = u.segment(off + 1, d - 1).dot(w.segment(off + 1, d - 1));
    const double factor = (zeta / u0 - w0) / rho;
    v(off) = (u0 * w0 - zeta) / rho;
    v.segment(off + 1, d - 1) =
      factor * u.segment(off + 1, d - 1) + w.segment(off + 1, d - 1) / u0;
    off += d;
  }
}

double IpmSolver::line_search(const Eigen::VectorXd & lambda, const Eigen::VectorXd & ds,
                              const Eigen::VectorXd & dz, double tau, double dtau, double kap,
                              double dkap) const
{
  double alpha = 10.0;
  if (sf_.l > 0) {
    const double rhomin = (ds.head(sf_.l).cwiseQuotient(lambda.head(sf_.l))).minCoeff();
    const double sigmamin = (dz.head(sf_.l).cwiseQuotient(lambda.head(sf_.l))).minCoeff();
    const double eps = 1e-13;
    if (-sigmamin > -rhomin) {
      alpha = sigmamin < 0.0 ? 1.0 / (-sigmamin) : 1.0 / eps;
    } else {
      alpha = rhomin < 0.0 ? 1.0 / (-rhomin) : 1.0 / eps;
    }
  }
  const double tau_bound = -tau / dtau;
  const double kap_bound = -kap / dkap;
  if (tau_bound > 0.0 && tau_bound < alpha) {
    alpha = tau_bound;
  }
  if (kap_bound > 0.0 && kap_bound < alpha) {
    alpha = kap_bound;
  }
  int off = sf_.l;
  for (int d : sf_.soc_dims) {
    const double lknorm2 =
      lambda(off) * lambda(off) - lambda.segment(off + 1, d - 1).squaredNorm();
    if (lknorm2 <= 0.0) {
      off += d;
      continue;
    }
    const double lknorm = std::sqrt(lknorm2);
    const Eigen::VectorXd lkbar = lambda.segment(off, d) / lknorm;
    const double lknorminv = 1.0 / lknorm;

    const double lkbar_ds =
      lkbar(0) * ds(off) - lkbar.tail(d - 1).dot(ds.segment(off + 1, d - 1));
    const double lkbar_dz =
      lkbar(0) * dz(off) - lkbar.tail(d - 1).dot(dz.segment(off + 1, d - 1));

    const double rho0 = lknorminv * lkbar_ds;
    double factor = (lkbar_ds + ds(off)) / (lkbar(0) + 1.0);
    const double rhonorm =
      (lknorminv * (ds.segment(off + 1, d - 1) - factor * lkbar.tail(d - 1))).norm() - rho0;

    const double sig0 = lknorminv * lkbar_dz;
    factor = (lkbar_dz + dz(off)) / (lkbar(0) + 1.0);
    const double signorm =
      (lknorminv * (dz.segment(off + 1, d - 1) - factor * lkbar.tail(d - 1))).norm() - sig0;

    const double conic_step = std::max({0.0, rhonorm, signorm});
    if (conic_step != 0.0) {
      alpha = std::min(alpha, 1.0 / conic_step);
    }
    off += d;
  }
  return std::clamp(alpha, kStepMin, kStepMax);
}

void IpmSolver::bring_to_cone(const Eigen::VectorXd & r, Eigen::VectorXd & s) const
{
  double alpha = -0.99;
  for (int i = 0; i < sf_.l; ++i) {
    alpha = std::max(alpha, -r(i));
  }
  int off = sf_.l;
  for (int d : sf_.soc_dims) {
    alpha = std::max(alpha, r.segment(off + 1, d - 1).norm() - r(off));
    off += d;
  }
  s = r;
  if (alpha >= 0.0) {
    s.head(sf_.l).array() += 1.0 + alpha;
    off = sf_.l;
    for (int d : sf_.soc_dims) {
      s(off) += 1.0 + alpha;
      off += d;
    }
  }
}

void IpmSolver::compute_residuals()
{
  rx_ = -(gt_ * w_.z);
  if (sf_.p > 0) {
    rx_ -= at_ * w_.y;
  }
  hresx_ = rx_.norm();
  rx_ -= w_.tau * sf_.c;

  if (sf_.p > 0) {
    ry_ = sf_.A * w_.x;
    hresy_ = ry_.norm();
    ry_ -= w_.tau * sf_.b;
  } else {
    ry_.resize(0);
    hresy_ = 0.0;
  }

  rz_ = w_.s + sf_.G * w_.x;
  hresz_ = rz_.norm();
  rz_ -= w_.tau * sf_.h;

  cx_ = sf_.c.dot(w_.x);
  by_ = sf_.p > 0 ? sf_.b.dot(w_.y) : 0.0;
  hz_ = sf_.h.dot(w_.z);
  rt_ = w_.kap + cx_ + by_ + hz_;

  nx_ = w_.x.norm();
  ny_ = w_.y.norm();
  nz_ = w_.z.norm();
  ns_ = w_.s.norm();
}

void IpmSolver::update_statistics()
{
  w_.gap = w_.s.dot(w_.z);
  w_.mu = (w_.gap + w_.kap * w_.tau) / (cone_degree_ + 1);
  w_.pcost = cx_ / w_.tau;
  w_.dcost = -(hz_ + by_) / w_.tau;

  if (w_.pcost < 0.0) {
    w_.relgap = w_.gap / (-w_.pcost);
  } else if (w_.dcost > 0.0) {
    w_.relgap = w_.gap / w_.dcost;
  } else {
    w_.relgap.reset();
  }

  const double nry = sf_.p > 0 ? ry_.norm() / std::max(resy0_ + nx_, 1.0) : 0.0;
  const double nrz = rz_.norm() / std::max(resz0_ + nx_ + ns_, 1.0);
  w_.pres = std::max(nry, nrz) / w_.tau;
  w_.dres = rx_.norm() / std::max(resx0_ + ny_ + nz_, 1.0) / w_.tau;

  w_.pinfres.reset();
  w_.dinfres.reset();
  if ((hz_ + by_) / std::max(ny_ + nz_, 1.0) < -opts_.reltol) {
    w_.pinfres = hresx_ / std::max(ny_ + nz_, 1.0);
  }
  if (cx_ / std::max(nx_, 1.0) < -opts_.reltol) {
    w_.dinfres = std::max(hresy_ / std::max(nx_, 1.0), hresz_ / std::max(nx_ + ns_, 1.0));
  }
}

ExitReason IpmSolver::check_exit(bool reduced_accuracy) const
{
  const double feastol = reduced_accuracy ? opts_.feastol_inacc : opts_.feastol;
  const double abstol = reduced_accuracy ? opts_.abstol_inacc : opts_.abstol;
  const double reltol = reduced_accuracy ? opts_.reltol_inacc : opts_.reltol;

  if ((-cx_ > 0.0 || -by_ - hz_ >= -abstol) && (w_.pres < feastol && w_.dres < feastol) &&
      (w_.gap < abstol || (w_.relgap.has_value() && w_.relgap.value() < reltol))) {
    return reduced_accuracy ? ExitReason::optimal_inaccurate : ExitReason::optimal;
  }
  if (w_.dinfres.has_value() && w_.dinfres.value() < feastol && w_.tau < w_.kap) {
    return ExitReason::dual_infeasible;
  }
  if ((w_.pinfres.has_value() && w_.pinfres.value() < feastol && w_.tau < w_.kap) ||
      (w_.tau < feastol && w_.kap < feastol && w_.pinfres.has_value() &&
       w_.pinfres.value() < feastol)) {
    return ExitReason::primal_infeasible;
  }
  return ExitReason::none;
}

ConicSolution IpmSolver::finish(ExitReason reason) const
{
  ConicSolution sol;
  sol.iterations = w_.iter;
  sol.v = (w_.x / w_.tau).cwiseQuotient(equil_x_);
  sol.objective_value = raw_.c.dot(sol.v);

  switch (reason) {
    case ExitReason::primal_infeasible:
      sol.status = SolveStatus::infeasible;
      sol.v.setZero();
      sol.objective_value = 0.0;
      return sol;
    case ExitReason::dual_infeasible:
      sol.status = SolveStatus::unbounded;
      sol.v.setZero();
      sol.objective_value = 0.0;
      return sol;
    case ExitReason::max_iters:
      sol.status = SolveStatus::max_iters;
      return sol;
    case ExitReason::numerics:
      sol.status = SolveStatus::numerical_failure;
      return sol;
    case ExitReason::optimal:
    case ExitReason::optimal_inaccurate:
      break;
    case ExitReason::none:
      sol.status = SolveStatus::numerical_failure;
      return sol;
  }

  // Certify the returned point against the solution invariants in the
  // original problem units; an inaccurate exit that still meets them is
  // reported optimal.
  const double eq_res =
    raw_.p > 0 ? (raw_.A * sol.v - raw_.b).lpNorm<Eigen::Infinity>() : 0.0;
  const Eigen::VectorXd s = raw_.h - raw_.G * sol.v;
  double cone_violation = 0.0;
  for (int i = 0; i < raw_.l; ++i) {
    cone_violation = std::max(cone_violation, -s(i));
  }
  int off = raw_.l;
  for (int d : raw_.soc_dims) {
    cone_violation = std::max(cone_violation, s.segment(off + 1, d - 1).norm() - s(off));
    off += d;
  }
  if (eq_res <= 1e-6 && cone_violation <= 1e-6) {
    sol.status = SolveStatus::optimal;
  } else {
    sol.status = SolveStatus::numerical_failure;
  }
  return sol;
}

ConicSolution IpmSolver::run()
{
  const int n = sf_.n, p = sf_.p, m = sf_.m;

  resx0_ = std::max(1.0, sf_.c.norm());
  resy0_ = std::max(1.0, sf_.b.norm());
  resz0_ = std::max(1.0, sf_.h.norm());

  if (!factorize()) {
    ConicSolution sol;
    sol.status = SolveStatus::numerical_failure;
    sol.v = Eigen::VectorXd::Zero(n);
    return sol;
  }

  // Initial point: x from min ||Gx - h|| s.t. Ax = b, s/z brought into the
  // cone from the corresponding slack solves.
  auto scatter_z = [&](Eigen::VectorXd & rhs, const Eigen::VectorXd & z_part) {
    rhs.tail(m_expanded_).setZero();
    for (int i = 0; i < sf_.m; ++i) {
      rhs(n + p + z_map_[i]) = z_part(i);
    }
  };

  Eigen::VectorXd rhs1 = Eigen::VectorXd::Zero(dim_);
  rhs1.segment(n, p) = sf_.b;
  scatter_z(rhs1, sf_.h);

  Eigen::VectorXd sol_vec, dx1(n), dy1(p), dz1(m), dx2(n), dy2(p), dz2(m);
  solve_kkt(rhs1, sol_vec);
  split(sol_vec, dx1, dy1, dz1);
  w_.x = dx1;
  bring_to_cone(-dz1, w_.s);

  Eigen::VectorXd rhs2 = Eigen::VectorXd::Zero(dim_);
  rhs2.head(n) = -sf_.c;
  solve_kkt(rhs2, sol_vec);
  split(sol_vec, dx2, dy2, dz2);
  w_.y = dy2;
  bring_to_cone(dz2, w_.z);

  w_.tau = 1.0;
  w_.kap = 1.0;
  scale(w_.z, w_.lambda);

  rhs1.head(n) = -sf_.c;

  double pres_prev = std::numeric_limits<double>::max();
  double last_step = 1.0;
  ExitReason reason = ExitReason::none;
  std::vector<double> gap_trace;

  for (w_.iter = 0; w_.iter <= opts_.max_iters; ++w_.iter) {
    compute_residuals();
    update_statistics();

    if (opts_.verbose) {
      std::printf(
        "it %3d  pcost %+.6e  dcost %+.6e  gap %.2e  pres %.2e  dres %.2e  k/t %.2e  "
        "step %.4f  |ry| %.2e  |rz| %.2e  tau %.2e\n",
        w_.iter, w_.pcost, w_.dcost, w_.gap, w_.pres, w_.dres, w_.kap / w_.tau, last_step,
        sf_.p > 0 ? ry_.norm() : 0.0, rz_.norm(), w_.tau);
    }

    // Backtrack to the best iterate on erratic progress.
    if (w_.iter > 0 && (w_.pres > kSafeguard * pres_prev || w_.gap < 0.0)) {
      w_ = best_;
      compute_residuals();
      update_statistics();
      reason = check_exit(true);
      if (reason == ExitReason::none) {
        reason = ExitReason::numerics;
      }
      break;
    }
    pres_prev = w_.pres;

    reason = check_exit(false);
    if (reason != ExitReason::none) {
      break;
    }

    // Jamming guard: near-degenerate problems can stop making
    // complementarity progress while staying feasible; exit at reduced
    // accuracy instead of burning the full iteration budget.
    gap_trace.push_back(std::abs(w_.gap));
    const int lookback = 15;
    const bool stalled =
      w_.iter >= lookback &&
      std::abs(w_.gap) > 0.5 * gap_trace[gap_trace.size() - 1 - lookback] &&
      std::max(w_.pres, w_.dres) < opts_.feastol_inacc;
    if (w_.iter > 0 && (stalled || last_step == kStepMin * kStepDamping)) {
      w_ = best_;
      compute_residuals();
      update_statistics();
      reason = check_exit(true);
      if (reason == ExitReason::none) {
        reason = ExitReason::numerics;
      }
      break;
    }
    if (w_.iter == opts_.max_iters) {
      if (!w_.better_than(best_)) {
        w_ = best_;
        compute_residuals();
        update_statistics();
      }
      reason = check_exit(true);
      if (reason == ExitReason::none) {
        reason = ExitReason::max_iters;
      }
      break;
    }
    if (std::isnan(w_.pcost)) {
      reason = ExitReason::numerics;
      break;
    }

    if (w_.iter == 0 || w_.better_than(best_)) {
      best_ = w_;
    }

    if (!update_scalings(w_.s, w_.z)) {
      reason = ExitReason::numerics;
      break;
    }
    scale(w_.z, w_.lambda);
    if (!factorize()) {
      reason = ExitReason::numerics;
      break;
    }

    // Static solve (reused in both direction computations).
    solve_kkt(rhs1, sol_vec);
    split(sol_vec, dx1, dy1, dz1);

    // Affine (predictor) direction.
    rhs2.head(n) = rx_;
    rhs2.segment(n, p) = -ry_;
    scatter_z(rhs2, w_.s - rz_);
    solve_kkt(rhs2, sol_vec);
    split(sol_vec, dx2, dy2, dz2);

    const double dtau_denom =
      w_.kap / w_.tau - sf_.c.dot(dx1) - sf_.b.dot(dy1) - sf_.h.dot(dz1);
    const double dtau_aff =
      (rt_ - w_.kap + sf_.c.dot(dx2) + sf_.b.dot(dy2) + sf_.h.dot(dz2)) / dtau_denom;

    Eigen::VectorXd dz_aff = dz2 + dtau_aff * dz1;
    Eigen::VectorXd w_dz_aff;
    scale(dz_aff, w_dz_aff);
    Eigen::VectorXd ds_by_w = -w_dz_aff - w_.lambda;
    const double dkap_aff = -w_.kap - w_.kap / w_.tau * dtau_aff;

    const double step_aff =
      line_search(w_.lambda, ds_by_w, w_dz_aff, w_.tau, dtau_aff, w_.kap, dkap_aff);
    const double sigma = std::clamp(std::pow(1.0 - step_aff, 3), kSigmaMin, kSigmaMax);

    // Mehrotra combined direction.
    Eigen::VectorXd ds1, ds2;
    conic_product(w_.lambda, w_.lambda, ds1);
    conic_product(ds_by_w, w_dz_aff, ds2);
    const double sigmamu = sigma * w_.mu;
    ds1 += ds2;
    ds1.head(sf_.l).array() -= sigmamu;
    int off = sf_.l;
    for (int d : sf_.soc_dims) {
      ds1(off) -= sigmamu;
      off += d;
    }
    Eigen::VectorXd lambda_inv_ds;
    conic_division(w_.lambda, ds1, lambda_inv_ds);
    Eigen::VectorXd w_lambda_inv_ds;
    scale(lambda_inv_ds, w_lambda_inv_ds);

    const double one_minus_sigma = 1.0 - sigma;
    rhs2.head(n) = one_minus_sigma * rx_;
    rhs2.segment(n, p) = -one_minus_sigma * ry_;
    scatter_z(rhs2, -one_minus_sigma * rz_ + w_lambda_inv_ds);
    solve_kkt(rhs2, sol_vec);
    split(sol_vec, dx2, dy2, dz2);

    const double bkap = w_.kap * w_.tau + dkap_aff * dtau_aff - sigmamu;
    const double dtau = (one_minus_sigma * rt_ - bkap / w_.tau + sf_.c.dot(dx2) +
                         sf_.b.dot(dy2) + sf_.h.dot(dz2)) /
                        dtau_denom;
    dx2 += dtau * dx1;
    dy2 += dtau * dy1;
    dz2 += dtau * dz1;

    Eigen::VectorXd w_dz;
    scale(dz2, w_dz);
    ds_by_w = -(lambda_inv_ds + w_dz);
    const double dkap = -(bkap + w_.kap * dtau) / w_.tau;

    const double step =
      kStepDamping * line_search(w_.lambda, ds_by_w, w_dz, w_.tau, dtau, w_.kap, dkap);
    last_step = step;

    Eigen::VectorXd ds;
    scale(ds_by_w, ds);

    w_.x += step * dx2;
    w_.y += step * dy2;
    w_.z += step * dz2;
    w_.s += step * ds;
    w_.kap += step * dkap;
    w_.tau += step * dtau;
  }

  return finish(reason);
}

}  // namespace

ConicSolution solve(const ConicProblem & p, const SolverSettings & settings)
{
  p.validate();
  StandardForm sf = build_standard_form(p);
  IpmSolver solver(std::move(sf), settings);
  return solver.run();
}

}  // namespace parkplan::conic
