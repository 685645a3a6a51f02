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

#include "parkplan/conic.hpp"

#include <cmath>
#include <stdexcept>

namespace parkplan::conic
{

AffineExpr & AffineExpr::operator+=(const AffineExpr & other)
{
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

AffineExpr & AffineExpr::operator-=(const AffineExpr & other)
{
  for (const AffineTerm & t : other.terms_) {
    terms_.push_back({t.index, -t.coeff});
  }
  constant_ -= other.constant_;
  return *this;
}

AffineExpr & AffineExpr::operator*=(double s)
{
  for (AffineTerm & t : terms_) {
    t.coeff *= s;
  }
  constant_ *= s;
  return *this;
}

double AffineExpr::evaluate(const Eigen::VectorXd & v) const
{
  double r = constant_;
  for (const AffineTerm & t : terms_) {
    r += t.coeff * v(t.index);
  }
  return r;
}

std::string to_string(SolveStatus s)
{
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::unbounded:
      return "unbounded";
    case SolveStatus::max_iters:
      return "max_iters";
    case SolveStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

int ConicProblem::add_variable_block(int n)
{
  if (n < 1) {
    throw std::invalid_argument("add_variable_block: block size must be >= 1");
  }
  const int first = n_vars_;
  n_vars_ += n;
  objective_.resize(n_vars_, 0.0);
  return first;
}

void ConicProblem::add_objective_term(int index, double coeff)
{
  if (index < 0 || index >= n_vars_) {
    throw std::invalid_argument("add_objective_term: index out of range");
  }
  objective_[index] += coeff;
}

void ConicProblem::add_objective(const AffineExpr & e)
{
  for (const AffineTerm & t : e.terms()) {
    add_objective_term(t.index, t.coeff);
  }
}

void ConicProblem::add_soc(AffineExpr t, std::vector<AffineExpr> y)
{
  if (y.empty()) {
    throw std::invalid_argument("add_soc: empty cone block");
  }
  soc_.push_back({std::move(t), std::move(y)});
}

int ConicProblem::add_abs_epigraph(const AffineExpr & e)
{
  const int t = add_variable_block(1);
  AffineExpr tv = AffineExpr::variable(t);
  add_nonneg(tv - e);
  add_nonneg(tv + e);
  return t;
}

int ConicProblem::add_soc_epigraph(const std::vector<AffineExpr> & y)
{
  const int t = add_variable_block(1);
  add_soc(AffineExpr::variable(t), y);
  return t;
}

namespace
{

void validate_expr(const AffineExpr & e, int n_vars, const char * what)
{
  if (!std::isfinite(e.constant())) {
    throw std::invalid_argument(std::string(what) + ": non-finite constant");
  }
  for (const AffineTerm & t : e.terms()) {
    if (t.index < 0 || t.index >= n_vars) {
      throw std::invalid_argument(std::string(what) + ": variable index out of range");
    }
    if (!std::isfinite(t.coeff)) {
      throw std::invalid_argument(std::string(what) + ": non-finite coefficient");
    }
  }
}

nlohmann::json expr_to_json(const AffineExpr & e)
{
  nlohmann::json terms = nlohmann::json::array();
  for (const AffineTerm & t : e.terms()) {
    terms.push_back({t.index, t.coeff});
  }
  return {{"terms", terms}, {"const", e.constant()}};
}

AffineExpr expr_from_json(const nlohmann::json & j)
{
  AffineExpr e(j.at("const").get<double>());
  for (const auto & t : j.at("terms")) {
    e.add_term(t.at(0).get<int>(), t.at(1).get<double>());
  }
  return e;
}

}  // namespace

void ConicProblem::validate() const
{
  for (double c : objective_) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("objective: non-finite coefficient");
    }
  }
  for (const AffineExpr & e : equalities_) {
    validate_expr(e, n_vars_, "equality");
  }
  for (const AffineExpr & e : nonneg_) {
    validate_expr(e, n_vars_, "nonneg cone");
  }
  for (const SocConstraint & c : soc_) {
    validate_expr(c.t, n_vars_, "soc cone");
    if (c.y.empty()) {
      throw std::invalid_argument("soc cone: empty block");
    }
    for (const AffineExpr & e : c.y) {
      validate_expr(e, n_vars_, "soc cone");
    }
  }
}

nlohmann::json ConicProblem::to_json() const
{
  nlohmann::json j;
  j["n_vars"] = n_vars_;
  j["objective"] = objective_;
  j["equalities"] = nlohmann::json::array();
  for (const AffineExpr & e : equalities_) {
    j["equalities"].push_back(expr_to_json(e));
  }
  j["nonneg"] = nlohmann::json::array();
  for (const AffineExpr & e : nonneg_) {
    j["nonneg"].push_back(expr_to_json(e));
  }
  j["soc"] = nlohmann::json::array();
  for (const SocConstraint & c : soc_) {
    nlohmann::json block;
    block["t"] = expr_to_json(c.t);
    block["y"] = nlohmann::json::array();
    for (const AffineExpr & e : c.y) {
      block["y"].push_back(expr_to_json(e));
    }
    j["soc"].push_back(block);
  }
  return j;
}

ConicProblem ConicProblem::from_json(const nlohmann::json & j)
{
  ConicProblem p;
  p.add_variable_block(j.at("n_vars").get<int>());
  const auto obj = j.at("objective").get<std::vector<double>>();
  for (size_t i = 0; i < obj.size(); ++i) {
    p.add_objective_term(static_cast<int>(i), obj[i]);
  }
  for (const auto & e : j.at("equalities")) {
    p.add_equality(expr_from_json(e));
  }
  for (const auto & e : j.at("nonneg")) {
    p.add_nonneg(expr_from_json(e));
  }
  for (const auto & c : j.at("soc")) {
    std::vector<AffineExpr> y;
    for (const auto & e : c.at("y")) {
      y.push_back(expr_from_json(e));
    }
    p.add_soc(expr_from_json(c.at("t")), std::move(y));
  }
  return p;
}

}  // namespace parkplan::conic
