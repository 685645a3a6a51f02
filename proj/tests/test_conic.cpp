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

#include <cmath>
#include <Eigen/Dense>
#include <fstream>
#include <random>
#include <vector>

#include <doctest.h>

#include "parkplan/conic.hpp"

using namespace parkplan::conic;

namespace
{

double uniform(std::mt19937_64 & gen, double lo, double hi)
{
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

TEST_CASE("variable blocks hand out contiguous fresh indices")
{
  ConicProblem p;
  CHECK(p.add_variable_block(3) == 0);
  CHECK(p.num_vars() == 3);
  CHECK(p.add_variable_block(2) == 3);
  CHECK(p.num_vars() == 5);
  CHECK_THROWS_AS(p.add_variable_block(0), std::invalid_argument);
}

TEST_CASE("malformed problems are rejected before solving")
{
  ConicProblem p;
  p.add_variable_block(2);
  AffineExpr bad = AffineExpr::variable(5);  // out of range
  p.add_nonneg(bad);
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
}

TEST_CASE("abs epigraph pins |e| at the optimum")
{
  SUBCASE("e fixed to -2")
  {
    ConicProblem p;
    const int x = p.add_variable_block(1);
    p.add_equality(AffineExpr::variable(x) + AffineExpr(2.0));  // x == -2
    const int t = p.add_abs_epigraph(AffineExpr::variable(x));
    p.add_objective_term(t, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.v(t) == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("e fixed to 0")
  {
    ConicProblem p;
    const int x = p.add_variable_block(1);
    p.add_equality(AffineExpr::variable(x));
    const int t = p.add_abs_epigraph(AffineExpr::variable(x));
    p.add_objective_term(t, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.v(t) == doctest::Approx(0.0).epsilon(1e-6));
  }
  SUBCASE("coupled free variable: min |x - 3| + x attains t = |x*|-shape optimum")
  {
    // min t + 0.5 x  s.t.  t >= |x - 3|, x >= 0. Analytic optimum: x = 3,
    // t = 0, objective 1.5 (slope comparison: moving x below 3 adds |dx| to
    // t faster than 0.5 dx is saved).
    ConicProblem p;
    const int x = p.add_variable_block(1);
    p.add_nonneg(AffineExpr::variable(x));
    const int t = p.add_abs_epigraph(AffineExpr::variable(x) - AffineExpr(3.0));
    p.add_objective_term(t, 1.0);
    p.add_objective_term(x, 0.5);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.v(x) == doctest::Approx(3.0).epsilon(1e-5));
    CHECK(sol.objective_value == doctest::Approx(1.5).epsilon(1e-6));
  }
}

TEST_CASE("soc epigraph pins the euclidean norm")
{
  SUBCASE("3-4-5")
  {
    ConicProblem p;
    const int y = p.add_variable_block(2);
    p.add_equality(AffineExpr::variable(y) - AffineExpr(3.0));
    p.add_equality(AffineExpr::variable(y + 1) - AffineExpr(4.0));
    const int t =
      p.add_soc_epigraph({AffineExpr::variable(y), AffineExpr::variable(y + 1)});
    p.add_objective_term(t, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.v(t) == doctest::Approx(5.0).epsilon(1e-6));
  }
  SUBCASE("zero vector")
  {
    ConicProblem p;
    const int y = p.add_variable_block(1);
    p.add_equality(AffineExpr::variable(y));
    const int t = p.add_soc_epigraph({AffineExpr::variable(y)});
    p.add_objective_term(t, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.v(t) == doctest::Approx(0.0).epsilon(1e-6));
  }
  SUBCASE("random fixed vectors")
  {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 25; ++trial) {
      ConicProblem p;
      const int n = 2 + static_cast<int>(gen() % 6);
      const int y = p.add_variable_block(n);
      double norm_sq = 0.0;
      std::vector<AffineExpr> block;
      for (int i = 0; i < n; ++i) {
        const double v = uniform(gen, -3.0, 3.0);
        norm_sq += v * v;
        p.add_equality(AffineExpr::variable(y + i) - AffineExpr(v));
        block.push_back(AffineExpr::variable(y + i));
      }
      const int t = p.add_soc_epigraph(block);
      p.add_objective_term(t, 1.0);
      const ConicSolution sol = solve(p);
      REQUIRE(sol.status == SolveStatus::optimal);
      CHECK(sol.v(t) == doctest::Approx(std::sqrt(norm_sq)).epsilon(1e-6));
    }
  }
}

TEST_CASE("status taxonomy on tiny problems")
{
  SUBCASE("min x s.t. x >= 1")
  {
    ConicProblem p;
    const int x = p.add_variable_block(1);
    p.add_nonneg(AffineExpr::variable(x) - AffineExpr(1.0));
    p.add_objective_term(x, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.v(x) == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("empty constraint set is infeasible")
  {
    ConicProblem p;
    const int x = p.add_variable_block(1);
    p.add_nonneg(AffineExpr::variable(x) - AffineExpr(1.0));  // x >= 1
    p.add_nonneg(-AffineExpr::variable(x));                   // x <= 0
    const ConicSolution sol = solve(p);
    CHECK(sol.status == SolveStatus::infeasible);
  }
  SUBCASE("descent ray is unbounded")
  {
    ConicProblem p;
    const int x = p.add_variable_block(1);
    p.add_nonneg(AffineExpr::variable(x));
    p.add_objective_term(x, -1.0);
    const ConicSolution sol = solve(p);
    CHECK(sol.status == SolveStatus::unbounded);
  }
}

TEST_CASE("random bounded LPs match brute-force vertex enumeration")
{
  // min c'x s.t. G x <= b over 3 variables; the optimum sits on a vertex,
  // found independently by enumerating all 3-row intersections.
  std::mt19937_64 gen(123);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3;
    const int m_random = 5;
    std::vector<Eigen::Vector3d> rows;
    std::vector<double> rhs;
    for (int r = 0; r < m_random; ++r) {
      Eigen::Vector3d a{uniform(gen, -1.0, 1.0), uniform(gen, -1.0, 1.0),
                        uniform(gen, -1.0, 1.0)};
      rows.push_back(a);
      rhs.push_back(uniform(gen, 0.5, 2.0));  // keeps the origin feasible
    }
    for (int i = 0; i < n; ++i) {
      Eigen::Vector3d a = Eigen::Vector3d::Zero();
      a(i) = 1.0;
      rows.push_back(a);
      rhs.push_back(10.0);
      rows.push_back(-a);
      rhs.push_back(10.0);
    }
    const Eigen::Vector3d c{uniform(gen, -1.0, 1.0), uniform(gen, -1.0, 1.0),
                            uniform(gen, -1.0, 1.0)};

    // Brute force over vertices.
    const int m = static_cast<int>(rows.size());
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
          Eigen::Matrix3d A;
          A.row(0) = rows[i].transpose();
          A.row(1) = rows[j].transpose();
          A.row(2) = rows[k].transpose();
          if (std::abs(A.determinant()) < 1e-9) {
            continue;
          }
          const Eigen::Vector3d v = A.lu().solve(Eigen::Vector3d{rhs[i], rhs[j], rhs[k]});
          bool feasible = true;
          for (int r = 0; r < m; ++r) {
            if (rows[r].dot(v) > rhs[r] + 1e-9) {
              feasible = false;
              break;
            }
          }
          if (feasible) {
            best = std::min(best, c.dot(v));
          }
        }
      }
    }
    REQUIRE(std::isfinite(best));

    ConicProblem p;
    const int x = p.add_variable_block(n);
    for (int r = 0; r < m; ++r) {
      AffineExpr e(rhs[r]);
      for (int i = 0; i < n; ++i) {
        e.add_term(x + i, -rows[r](i));
      }
      p.add_nonneg(e);
    }
    for (int i = 0; i < n; ++i) {
      p.add_objective_term(x + i, c(i));
    }
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.objective_value ==
          doctest::Approx(best).epsilon(1e-6).scale(std::max(1.0, std::abs(best))));
  }
}

TEST_CASE("optimal solutions satisfy the residual invariants")
{
  std::mt19937_64 gen(55);
  for (int trial = 0; trial < 10; ++trial) {
    ConicProblem p;
    const int x = p.add_variable_block(4);
    p.add_equality(
      AffineExpr::variable(x) + AffineExpr::variable(x + 1) - AffineExpr(1.0));
    p.add_equality(
      AffineExpr::variable(x + 2) - AffineExpr::variable(x + 3) -
      AffineExpr(uniform(gen, -1.0, 1.0)));
    for (int i = 0; i < 4; ++i) {
      p.add_nonneg(AffineExpr::variable(x + i) + AffineExpr(5.0));
      p.add_nonneg(AffineExpr(5.0) - AffineExpr::variable(x + i));
    }
    const int t = p.add_soc_epigraph(
      {AffineExpr::variable(x), AffineExpr::variable(x + 2)});
    p.add_objective_term(t, 1.0);
    p.add_objective_term(x + 1, uniform(gen, -0.5, 0.5));
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);

    for (const AffineExpr & e : p.equalities()) {
      CHECK(std::abs(e.evaluate(sol.v)) <= 1e-6);
    }
    for (const AffineExpr & e : p.nonneg_cones()) {
      CHECK(e.evaluate(sol.v) >= -1e-6);
    }
    for (const SocConstraint & cone : p.soc_cones()) {
      double norm_sq = 0.0;
      for (const AffineExpr & e : cone.y) {
        const double v = e.evaluate(sol.v);
        norm_sq += v * v;
      }
      CHECK(std::sqrt(norm_sq) <= cone.t.evaluate(sol.v) + 1e-6);
    }
  }
}

TEST_CASE("json round trip preserves the problem")
{
  ConicProblem p;
  const int x = p.add_variable_block(3);
  p.add_equality(AffineExpr::variable(x) + AffineExpr(1.5));
  p.add_nonneg(AffineExpr::variable(x + 1) - AffineExpr(0.25));
  p.add_soc(
    AffineExpr::variable(x + 2),
    {AffineExpr::variable(x) - AffineExpr::variable(x + 1)});
  p.add_objective_term(x + 2, 1.0);

  const ConicProblem q = ConicProblem::from_json(p.to_json());
  CHECK(q.num_vars() == p.num_vars());
  CHECK(q.to_json() == p.to_json());

  const ConicSolution a = solve(p);
  const ConicSolution b = solve(q);
  REQUIRE(a.status == SolveStatus::optimal);
  REQUIRE(b.status == SolveStatus::optimal);
  CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-12));
}

TEST_CASE("regression set solved to reference objectives")
{
  // Reference objectives were produced offline by an independent high
  // accuracy interior-point solver; see tests/data/conic_regression.
  std::ifstream index(std::string(PARKPLAN_TEST_DATA) + "/conic_regression/index.json");
  REQUIRE(index.good());
  nlohmann::json files;
  index >> files;
  REQUIRE(files.size() >= 10);
  for (const auto & entry : files) {
    std::ifstream in(
      std::string(PARKPLAN_TEST_DATA) + "/conic_regression/" +
      entry.at("file").get<std::string>());
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    const ConicProblem p = ConicProblem::from_json(j);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    const double expected = entry.at("objective").get<double>();
    CHECK(std::abs(sol.objective_value - expected) <=
          1e-6 * std::max(1.0, std::abs(expected)));
  }
}
