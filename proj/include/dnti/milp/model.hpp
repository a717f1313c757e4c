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

#ifndef DNTI_MILP_MODEL_HPP_
#define DNTI_MILP_MODEL_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace dnti::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { kContinuous, kBinary };
enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInf;
  // Branching class; fractional binaries of the highest class are branched
  // on first.
  int priority = 0;
};

struct Term {
  int var = 0;
  double coef = 0.0;

  bool operator==(const Term&) const = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // sorted by var, no duplicates, no zeros
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// A fixing the model builder knows to be safe for the instance (for example
// a sign indicator pinned by a precise measurement). Applied by root
// presolve when SolveOptions::apply_hints is set.
struct FixingHint {
  int var = 0;
  double value = 0.0;
};

// Generic minimisation MILP over continuous and binary variables.
class MilpModel {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  int add_continuous(std::string name, double lower = 0.0, double upper = kInf) {
    return add_variable(std::move(name), VarKind::kContinuous, lower, upper);
  }
  int add_binary(std::string name) {
    return add_variable(std::move(name), VarKind::kBinary, 0.0, 1.0);
  }
  // Merges repeated variables and drops zero coefficients.
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                     double rhs);
  void set_objective(int var, double coef);
  void set_priority(int var, int priority);
  void add_hint(int var, double value) { hints_.push_back({var, value}); }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Variable& variable(int id) const { return variables_.at(id); }
  const Constraint& constraint(int id) const { return constraints_.at(id); }
  const std::map<int, double>& objective() const { return objective_; }
  const std::vector<FixingHint>& hints() const { return hints_; }
  Variable& mutable_variable(int id) { return variables_.at(id); }

  // Throws DomainError when an invariant is broken (binary bounds outside
  // [0,1], non-finite coefficients, dangling variable ids).
  void validate() const;

  double objective_value(const std::vector<double>& x) const;
  double row_activity(int row, const std::vector<double>& x) const;
  // Largest absolute violation of any row or variable bound at x.
  double max_violation(const std::vector<double>& x) const;
  double row_violation(int row, const std::vector<double>& x) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::map<int, double> objective_;
  std::vector<FixingHint> hints_;
};

// Same kinds, bounds, rows and objective, ignoring names, priorities and
// hints.
bool structurally_equal(const MilpModel& a, const MilpModel& b);

struct SolveOptions {
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-7;
  double relative_gap = 1e-6;
  std::int64_t node_limit = 200000;
  double time_limit_seconds = 120.0;
  bool presolve = true;
  bool apply_hints = true;
  bool use_priorities = true;
  // Progress line on stderr every this many nodes; 0 disables.
  std::int64_t log_interval = 0;
};

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kGapLimit,
  kNodeLimit,
  kTimeLimit,
};

const char* to_string(SolveStatus status);

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> values;  // indexed by variable id; empty if none found
  double objective = kInf;
  double best_bound = -kInf;
  double gap = kInf;
  std::int64_t nodes_explored = 0;
  std::int64_t lp_iterations = 0;
  double max_violation = 0.0;

  bool has_solution() const { return !values.empty(); }
};

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kNumericalFailure,
  kIterationLimit
};

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> values;
  double objective = 0.0;
  std::int64_t iterations = 0;
};

// LP relaxation (binaries relaxed to [0,1]) with the given variables fixed.
LpResult lp_solve(const MilpModel& model,
                  const std::map<int, double>& fixings = {});

// Best-bound branch and bound over the binaries.
MilpSolution solve(const MilpModel& model, const SolveOptions& opts = {});

}  // namespace dnti::milp

#endif  // DNTI_MILP_MODEL_HPP_
