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

#include <Eigen/Core>
#include <json.hpp>

namespace parkplan::conic
{

/// One entry of a sparse affine scalar expression.
struct AffineTerm
{
  int index;
  double coeff;
};

/// Sparse affine expression  sum_i coeff_i * v[index_i] + constant.
class AffineExpr
{
public:
  AffineExpr() = default;
  explicit AffineExpr(double constant) : constant_(constant) {}

  static AffineExpr variable(int index, double coeff = 1.0)
  {
    AffineExpr e;
    e.terms_.push_back({index, coeff});
    return e;
  }

  AffineExpr & add_term(int index, double coeff)
  {
    if (coeff != 0.0) {
      terms_.push_back({index, coeff});
    }
    return *this;
  }

  AffineExpr & add_constant(double c)
  {
    constant_ += c;
    return *this;
  }

  AffineExpr & operator+=(const AffineExpr & other);
  AffineExpr & operator-=(const AffineExpr & other);
  AffineExpr & operator*=(double s);

  friend AffineExpr operator+(AffineExpr a, const AffineExpr & b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr & b) { return a -= b; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator-(AffineExpr a)
  {
    a *= -1.0;
    return a;
  }

  const std::vector<AffineTerm> & terms() const { return terms_; }
  double constant() const { return constant_; }

  double evaluate(const Eigen::VectorXd & v) const;

private:
  std::vector<AffineTerm> terms_;
  double constant_ = 0.0;
};

enum class SolveStatus
{
  optimal,
  infeasible,
  unbounded,
  max_iters,
  numerical_failure,
};

std::string to_string(SolveStatus s);

struct ConicSolution
{
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd v;
  double objective_value = 0.0;
  int iterations = 0;
};

struct SocConstraint
{
  AffineExpr t;
  std::vector<AffineExpr> y;
};

struct SolverSettings
{
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  double feastol_inacc = 1e-4;
  double abstol_inacc = 2e-4;
  double reltol_inacc = 2e-4;
  int max_iters = 300;
  int refine_iters = 9;
  double static_reg = 7e-8;
  bool verbose = false;
};

/// Standard-form conic program builder: linear objective, affine equality
/// rows, nonnegativity rows and second-order cones over one flat variable
/// vector. Cone members are stored as affine expressions of the variables.
class ConicProblem
{
public:
  /// Appends n fresh variables, returns the index of the first one.
  int add_variable_block(int n);

  int num_vars() const { return n_vars_; }

  void add_objective_term(int index, double coeff);
  void add_objective(const AffineExpr & e);

  /// Constrains e == 0.
  void add_equality(const AffineExpr & e) { equalities_.push_back(e); }

  /// Constrains e >= 0.
  void add_nonneg(const AffineExpr & e) { nonneg_.push_back(e); }

  /// Constrains ||y||_2 <= t.
  void add_soc(AffineExpr t, std::vector<AffineExpr> y);

  /// Adds variable t with t >= e and t >= -e, returns its index.
  int add_abs_epigraph(const AffineExpr & e);

  /// Adds variable t with ||y||_2 <= t, returns its index.
  int add_soc_epigraph(const std::vector<AffineExpr> & y);

  const std::vector<double> & objective() const { return objective_; }
  const std::vector<AffineExpr> & equalities() const { return equalities_; }
  const std::vector<AffineExpr> & nonneg_cones() const { return nonneg_; }
  const std::vector<SocConstraint> & soc_cones() const { return soc_; }

  /// Throws std::invalid_argument on malformed data (bad indices, empty
  /// cones, non-finite coefficients).
  void validate() const;

  nlohmann::json to_json() const;
  static ConicProblem from_json(const nlohmann::json & j);

private:
  int n_vars_ = 0;
  std::vector<double> objective_;
  std::vector<AffineExpr> equalities_;
  std::vector<AffineExpr> nonneg_;
  std::vector<SocConstraint> soc_;
};

/// Solves the problem with the embedded primal-dual interior-point method.
ConicSolution solve(const ConicProblem & p, const SolverSettings & settings = {});

}  // namespace parkplan::conic
