// Copyright 2026 The dnti Authors
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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "dnti/error.hpp"
#include "dnti/milp/model.hpp"
#include "dnti/milp/mps.hpp"
#include "dnti/milp/presolve.hpp"
#include "dnti/milp/simplex.hpp"
#include "dnti/textio.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace dnti::milp {
namespace {

using Terms = std::vector<Term>;

// Bounded random model: `bins` binaries, `conts` continuous variables in
// [-5, 5], rows built around a random anchor point so most instances are
// feasible.
MilpModel random_model(std::mt19937_64& rng, int bins, int conts, int rows) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> slack(0.0, 2.0);
  MilpModel m;
  std::vector<double> anchor;
  for (int j = 0; j < bins; ++j) {
    m.add_binary("b" + std::to_string(j));
    anchor.push_back(static_cast<double>(rng() % 2));
  }
  for (int j = 0; j < conts; ++j) {
    m.add_continuous("x" + std::to_string(j), -5.0, 5.0);
    anchor.push_back(std::uniform_real_distribution<double>(-4.0, 4.0)(rng));
  }
  const int n = bins + conts;
  for (int i = 0; i < rows; ++i) {
    Terms terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (rng() % 3 == 0) continue;
      const double a = std::round(coef(rng) * 4.0) / 4.0;
      terms.push_back({j, a});
      act += a * anchor[j];
    }
    const int kind = static_cast<int>(rng() % 5);
    const double off = rng() % 4 == 0 ? -slack(rng) : slack(rng);
    if (kind == 0) {
      m.add_constraint("r" + std::to_string(i), terms, Sense::kEqual, act);
    } else if (kind % 2 == 1) {
      m.add_constraint("r" + std::to_string(i), terms, Sense::kLessEqual, act + off);
    } else {
      m.add_constraint("r" + std::to_string(i), terms, Sense::kGreaterEqual, act - off);
    }
  }
  for (int j = 0; j < n; ++j) {
    if (rng() % 4 != 0) m.set_objective(j, std::round(coef(rng) * 8.0) / 8.0);
  }
  return m;
}

TEST_SUITE("milp") {

TEST_CASE("model building merges terms and validates") {
  MilpModel m;
  const int x = m.add_continuous("x");
  const int y = m.add_binary("y");
  m.add_constraint("c", {{y, 1.0}, {x, 2.0}, {x, 1.0}, {y, -1.0}}, Sense::kLessEqual, 4.0);
  const Constraint& c = m.constraint(0);
  REQUIRE(c.terms.size() == 1);
  CHECK(c.terms[0] == Term{x, 3.0});
  CHECK(m.num_binaries() == 1);
  CHECK(m.row_activity(0, {1.0, 0.0}) == 3.0);
  CHECK(m.row_violation(0, {2.0, 0.0}) == doctest::Approx(2.0));
  CHECK(m.max_violation({-1.0, 0.5}) == doctest::Approx(1.0));
  CHECK_NOTHROW(m.validate());

  MilpModel bad = m;
  bad.mutable_variable(y).upper = 2.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  MilpModel nan = m;
  nan.add_constraint("n", {{x, std::nan("")}}, Sense::kEqual, 0.0);
  CHECK_THROWS_AS(nan.validate(), DomainError);
  MilpModel dangling = m;
  dangling.add_constraint("d", {{7, 1.0}}, Sense::kEqual, 0.0);
  CHECK_THROWS_AS(dangling.validate(), DomainError);
}

TEST_CASE("LP relaxation matches vertex enumeration") {
  std::mt19937_64 rng(101);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const MilpModel m = random_model(rng, static_cast<int>(rng() % 2),
                                     2 + static_cast<int>(rng() % 2),
                                     1 + static_cast<int>(rng() % 5));
    const std::optional<double> oracle = test::vertex_enumeration_min(m);
    const LpResult lp = lp_solve(m);
    if (!oracle) {
      CHECK(lp.status == LpStatus::kInfeasible);
      continue;
    }
    ++feasible;
    REQUIRE(lp.status == LpStatus::kOptimal);
    CHECK(lp.objective == doctest::Approx(*oracle).epsilon(1e-7).scale(1.0));
    CHECK(m.max_violation(lp.values) <= 1e-7);
  }
  CHECK(feasible > 150);
}

TEST_CASE("branch and bound matches binary enumeration") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 150; ++trial) {
    const int bins = 1 + static_cast<int>(rng() % 6);
    const MilpModel m = random_model(rng, bins, 1 + static_cast<int>(rng() % 2),
                                     1 + static_cast<int>(rng() % 5));
    // Independent oracle: vertex enumeration per binary assignment.
    std::optional<double> best;
    for (int mask = 0; mask < (1 << bins); ++mask) {
      std::map<int, double> fix;
      for (int j = 0; j < bins; ++j) fix[j] = (mask >> j) & 1;
      const auto v = test::vertex_enumeration_min(m, fix);
      if (v && (!best || *v < *best)) best = v;
    }
    const MilpSolution sol = solve(m);
    if (!best) {
      CHECK(sol.status == SolveStatus::kInfeasible);
      continue;
    }
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(*best).epsilon(1e-6).scale(1.0));
    CHECK(m.max_violation(sol.values) <= 1e-6);
    for (int j = 0; j < bins; ++j) {
      CHECK((sol.values[j] == 0.0 || sol.values[j] == 1.0));
    }
  }
}

TEST_CASE("branch and bound without presolve or priorities agrees") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 60; ++trial) {
    const MilpModel m = random_model(rng, 4 + static_cast<int>(rng() % 4), 2, 4);
    SolveOptions plain;
    plain.presolve = false;
    plain.use_priorities = false;
    const MilpSolution a = solve(m);
    const MilpSolution b = solve(m, plain);
    CHECK(a.status == b.status);
    if (a.has_solution() && b.has_solution()) {
      CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("topology-identification toy models match enumeration") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const test::ToyInstance toy = test::random_toy_instance(seed);
    const MilpModel& m = toy.f.model;
    const test::EnumerationResult oracle = test::enumerate_binaries(m);
    REQUIRE(oracle.feasible);
    const MilpSolution sol = solve(m);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(oracle.best).epsilon(1e-6).scale(1.0));
    const std::vector<double> bins = test::binary_part(m, sol.values);
    bool among = false;
    for (const auto& a : oracle.optimal_assignments) among = among || a == bins;
    CHECK(among);
  }
}

TEST_CASE("infeasible, unbounded and trivial models") {
  MilpModel inf;
  const int x = inf.add_binary("x");
  inf.add_constraint("lo", {{x, 1.0}}, Sense::kGreaterEqual, 0.5);
  inf.add_constraint("hi", {{x, 1.0}}, Sense::kLessEqual, 0.4);
  CHECK(solve(inf).status == SolveStatus::kInfeasible);
  CHECK(lp_solve(inf).status == LpStatus::kInfeasible);

  MilpModel unb;
  const int y = unb.add_continuous("y", -kInf, kInf);
  const int b = unb.add_binary("b");
  unb.add_constraint("c", {{y, 1.0}, {b, 1.0}}, Sense::kLessEqual, 3.0);
  unb.set_objective(y, 1.0);
  CHECK(solve(unb).status == SolveStatus::kUnbounded);
  CHECK(lp_solve(unb).status == LpStatus::kUnbounded);

  MilpModel one;
  const int z = one.add_continuous("z", 0.0, 10.0);
  one.add_constraint("c1", {{z, 1.0}}, Sense::kGreaterEqual, 2.0);
  one.set_objective(z, 1.0);
  const MilpSolution s = solve(one);
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(2.0));
  CHECK(s.gap == doctest::Approx(0.0));
}

TEST_CASE("fixings in lp_solve") {
  MilpModel m;
  const int a = m.add_binary("a");
  const int x = m.add_continuous("x", 0.0, 4.0);
  m.add_constraint("c", {{x, 1.0}, {a, -4.0}}, Sense::kLessEqual, 0.0);
  m.set_objective(x, -1.0);
  m.set_objective(a, 0.5);
  CHECK(lp_solve(m, {{a, 0.0}}).objective == doctest::Approx(0.0));
  CHECK(lp_solve(m, {{a, 1.0}}).objective == doctest::Approx(-3.5));
  CHECK(lp_solve(m).objective == doctest::Approx(-3.5));
}

TEST_CASE("hints fix variables in presolve") {
  MilpModel m;
  const int a = m.add_binary("a");
  const int b = m.add_binary("b");
  m.add_constraint("one", {{a, 1.0}, {b, 1.0}}, Sense::kEqual, 1.0);
  m.set_objective(a, 1.0);
  m.set_objective(b, 2.0);
  CHECK(solve(m).values[a] == 1.0);
  m.add_hint(b, 1.0);
  CHECK(solve(m).values[b] == 1.0);
  SolveOptions no_hints;
  no_hints.apply_hints = false;
  CHECK(solve(m, no_hints).values[a] == 1.0);
}

TEST_CASE("propagation tightens bounds and detects empty domains") {
  std::vector<SparseRow> rows{{{0, 1}, {1.0, 1.0}, -kInf, 1.0}};
  const Propagator prop(&rows, {1, 1}, 2);
  std::vector<double> lo{1.0, 0.0};
  std::vector<double> hi{1.0, 1.0};
  CHECK(prop.propagate(lo, hi));
  CHECK(hi[1] == 0.0);
  lo = {1.0, 1.0};
  hi = {1.0, 1.0};
  CHECK_FALSE(prop.propagate(lo, hi));
}

TEST_CASE("dense simplex warm start after bound changes") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    MilpModel m = random_model(rng, 0, 3, 4);
    LpProblem lp;
    lp.rows = m.num_constraints();
    lp.cols = m.num_variables();
    lp.a.assign(static_cast<std::size_t>(lp.rows) * lp.cols, 0.0);
    lp.cost.assign(lp.cols, 0.0);
    for (const auto& [var, c] : m.objective()) lp.cost[var] = c;
    for (int i = 0; i < lp.rows; ++i) {
      const Constraint& c = m.constraint(i);
      for (const Term& t : c.terms) lp.a[i * lp.cols + t.var] = t.coef;
      lp.row_lower.push_back(c.sense == Sense::kLessEqual ? -kInf : c.rhs);
      lp.row_upper.push_back(c.sense == Sense::kGreaterEqual ? kInf : c.rhs);
    }
    for (const Variable& v : m.variables()) {
      lp.col_lower.push_back(v.lower);
      lp.col_upper.push_back(v.upper);
    }
    DenseSimplex simplex(lp);
    simplex.solve();
    // Tighten one column and compare with a cold solve of the tightened model.
    const int j = static_cast<int>(rng() % 3);
    const double mid = std::uniform_real_distribution<double>(-4.0, 4.0)(rng);
    simplex.set_col_bounds(j, mid, 5.0);
    const LpStatus warm = simplex.solve();
    m.mutable_variable(j).lower = mid;
    const auto oracle = test::vertex_enumeration_min(m);
    if (!oracle) {
      CHECK(warm == LpStatus::kInfeasible);
    } else {
      REQUIRE(warm == LpStatus::kOptimal);
      CHECK(simplex.objective() == doctest::Approx(*oracle).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("MPS round trip keeps the model structure") {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 50; ++trial) {
    MilpModel m = random_model(rng, 3, 3, 4);
    m.add_continuous("a_very_long_name", -kInf, kInf);
    m.add_continuous("fixed", 2.5, 2.5);
    m.add_continuous("neg", -kInf, 3.0);
    m.add_continuous("dup", 0.0, 1.0);
    m.add_continuous("dup", 0.0, 2.0);
    m.set_objective(m.num_variables() - 1, 1.0 / 3.0);
    const std::string text = export_mps(m);
    const MilpModel back = import_mps(text);
    CHECK(structurally_equal(m, back));
    CHECK(export_mps(back) == text);
  }
}

TEST_CASE("MPS golden fixture for a one-variable model") {
  MilpModel m;
  const int z = m.add_continuous("z", 0.0, 10.0);
  m.add_constraint("c1", {{z, 1.0}}, Sense::kGreaterEqual, 2.0);
  m.set_objective(z, 1.0);
  CHECK(export_mps(m) == read_text_file(test::fixture_dir() + "/one_var.mps"));
}

TEST_CASE("MPS reader accepts markers and reports errors with context") {
  const std::string text =
      "NAME TEST\n"
      "ROWS\n N obj\n L lim\n"
      "COLUMNS\n"
      "    MARKER                 'MARKER'                 'INTORG'\n"
      "    y  obj  -1  lim  1\n"
      "    MARKER                 'MARKER'                 'INTEND'\n"
      "    x  obj  1   lim  2\n"
      "RHS\n    RHS  lim  3\n"
      "BOUNDS\n UP BND y 1\n LO BND x -2\n UP BND x 1\n"
      "ENDATA\n";
  const MilpModel m = import_mps(text);
  REQUIRE(m.num_variables() == 2);
  CHECK(m.variable(0).kind == VarKind::kBinary);
  CHECK(m.variable(1).lower == -2.0);
  CHECK(m.variable(1).upper == 1.0);
  CHECK(solve(m).objective == doctest::Approx(-3.0));

  CHECK_THROWS_AS(import_mps("ROWS\n N obj\nCOLUMNS\n x unknown 1\nENDATA\n"), ParseError);
  CHECK_THROWS_AS(import_mps("ROWS\n Q obj\nENDATA\n"), ParseError);
  CHECK_THROWS_AS(import_mps("ROWS\n N obj\n L r\nRANGES\n RNG r 1\nENDATA\n"), ParseError);
  try {
    import_mps("NAME X\nROWS\n N obj\nCOLUMNS\n x obj abc\nENDATA\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace dnti::milp
