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

#include "dnti/milp/model.hpp"

#include <algorithm>
#include <cmath>

#include "dnti/error.hpp"

namespace dnti::milp {

int MilpModel::add_variable(std::string name, VarKind kind, double lower,
                            double upper) {
  Variable v;
  v.name = std::move(name);
  v.kind = kind;
  v.lower = lower;
  v.upper = upper;
  variables_.push_back(std::move(v));
  return static_cast<int>(variables_.size()) - 1;
}

int MilpModel::add_constraint(std::string name, std::vector<Term> terms,
                              Sense sense, double rhs) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  Constraint c;
  c.name = std::move(name);
  c.terms = std::move(merged);
  c.sense = sense;
  c.rhs = rhs;
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

void MilpModel::set_objective(int var, double coef) {
  if (coef == 0.0) {
    objective_.erase(var);
  } else {
    objective_[var] = coef;
  }
}

void MilpModel::set_priority(int var, int priority) {
  variables_.at(var).priority = priority;
}

int MilpModel::num_binaries() const {
  return static_cast<int>(std::count_if(
      variables_.begin(), variables_.end(),
      [](const Variable& v) { return v.kind == VarKind::kBinary; }));
}

void MilpModel::validate() const {
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    const Variable& v = variables_[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw DomainError("variable " + v.name + " has invalid bounds");
    }
    if (v.kind == VarKind::kBinary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw DomainError("binary variable " + v.name + " has bounds outside [0,1]");
    }
  }
  for (const Constraint& c : constraints_) {
    if (!std::isfinite(c.rhs)) {
      throw DomainError("constraint " + c.name + " has a non-finite rhs");
    }
    for (const Term& t : c.terms) {
      if (t.var < 0 || t.var >= n) {
        throw DomainError("constraint " + c.name + " references unknown variable");
      }
      if (!std::isfinite(t.coef)) {
        throw DomainError("constraint " + c.name + " has a non-finite coefficient");
      }
    }
  }
  for (const auto& [var, coef] : objective_) {
    if (var < 0 || var >= n || !std::isfinite(coef)) {
      throw DomainError("objective references an unknown variable or bad coefficient");
    }
  }
  for (const FixingHint& h : hints_) {
    if (h.var < 0 || h.var >= n) throw DomainError("hint on unknown variable");
  }
}

double MilpModel::objective_value(const std::vector<double>& x) const {
  double z = 0.0;
  for (const auto& [var, coef] : objective_) z += coef * x[var];
  return z;
}

double MilpModel::row_activity(int row, const std::vector<double>& x) const {
  double act = 0.0;
  for (const Term& t : constraints_[row].terms) act += t.coef * x[t.var];
  return act;
}

double MilpModel::row_violation(int row, const std::vector<double>& x) const {
  const Constraint& c = constraints_[row];
  const double act = row_activity(row, x);
  switch (c.sense) {
    case Sense::kLessEqual:
      return std::max(0.0, act - c.rhs);
    case Sense::kGreaterEqual:
      return std::max(0.0, c.rhs - act);
    case Sense::kEqual:
      return std::abs(act - c.rhs);
  }
  return 0.0;
}

double MilpModel::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, variables_[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables_[j].upper);
  }
  for (int i = 0; i < num_constraints(); ++i) {
    worst = std::max(worst, row_violation(i, x));
  }
  return worst;
}

bool structurally_equal(const MilpModel& a, const MilpModel& b) {
  if (a.num_variables() != b.num_variables() ||
      a.num_constraints() != b.num_constraints() ||
      a.objective() != b.objective()) {
    return false;
  }
  for (int j = 0; j < a.num_variables(); ++j) {
    const Variable& va = a.variable(j);
    const Variable& vb = b.variable(j);
    if (va.kind != vb.kind || va.lower != vb.lower || va.upper != vb.upper) {
      return false;
    }
  }
  for (int i = 0; i < a.num_constraints(); ++i) {
    const Constraint& ca = a.constraint(i);
    const Constraint& cb = b.constraint(i);
    if (ca.sense != cb.sense || ca.rhs != cb.rhs || ca.terms != cb.terms) {
      return false;
    }
  }
  return true;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kGapLimit:
      return "gap_limit";
    case SolveStatus::kNodeLimit:
      return "node_limit";
    case SolveStatus::kTimeLimit:
      return "time_limit";
  }
  return "unknown";
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kNumericalFailure:
      return "numerical_failure";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

}  // namespace dnti::milp
