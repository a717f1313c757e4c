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

#include "dnti/milp/presolve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace dnti::milp {
namespace {

constexpr double kIntTol = 1e-6;
constexpr double kBoundCap = 1e12;

double rel(double v) { return std::max(1.0, std::abs(v)); }

}  // namespace

Propagator::Propagator(const std::vector<SparseRow>* rows,
                       std::vector<char> is_int, int num_cols)
    : rows_(rows), is_int_(std::move(is_int)), col_rows_(num_cols) {
  for (int r = 0; r < static_cast<int>(rows_->size()); ++r) {
    for (int j : (*rows_)[r].idx) col_rows_[j].push_back(r);
  }
}

bool Propagator::tighten_row(int r, std::vector<double>& lo,
                             std::vector<double>& hi,
                             std::vector<int>& changed) const {
  const SparseRow& row = (*rows_)[r];
  const int len = static_cast<int>(row.idx.size());
  double min_act = 0.0;
  double max_act = 0.0;
  int min_inf = 0;
  int max_inf = 0;
  for (int p = 0; p < len; ++p) {
    const int j = row.idx[p];
    const double a = row.val[p];
    const double lo_c = a > 0 ? a * lo[j] : a * hi[j];
    const double hi_c = a > 0 ? a * hi[j] : a * lo[j];
    if (std::isfinite(lo_c)) min_act += lo_c; else ++min_inf;
    if (std::isfinite(hi_c)) max_act += hi_c; else ++max_inf;
  }
  const double tol = 1e-6;
  if (min_inf == 0 && min_act > row.upper + tol * rel(row.upper)) return false;
  if (max_inf == 0 && max_act < row.lower - tol * rel(row.lower)) return false;

  for (int p = 0; p < len; ++p) {
    const int j = row.idx[p];
    const double a = row.val[p];
    const double lo_c = a > 0 ? a * lo[j] : a * hi[j];
    const double hi_c = a > 0 ? a * hi[j] : a * lo[j];
    double new_lo = -kInf;
    double new_hi = kInf;
    if (std::isfinite(row.upper)) {
      double resid = kInf;
      if (min_inf == 0) {
        resid = min_act - lo_c;
      } else if (min_inf == 1 && !std::isfinite(lo_c)) {
        resid = min_act;
      }
      if (std::isfinite(resid)) {
        const double b = (row.upper - resid) / a;
        if (a > 0) new_hi = b; else new_lo = b;
      }
    }
    if (std::isfinite(row.lower)) {
      double resid = kInf;
      if (max_inf == 0) {
        resid = max_act - hi_c;
      } else if (max_inf == 1 && !std::isfinite(hi_c)) {
        resid = max_act;
      }
      if (std::isfinite(resid)) {
        const double b = (row.lower - resid) / a;
        if (a > 0) new_lo = std::max(new_lo, b); else new_hi = std::min(new_hi, b);
      }
    }
    bool moved = false;
    if (is_int_[j]) {
      if (new_hi < kInf) {
        const double f = std::floor(new_hi + kIntTol);
        if (f < hi[j]) {
          hi[j] = f;
          moved = true;
        }
      }
      if (new_lo > -kInf) {
        const double c = std::ceil(new_lo - kIntTol);
        if (c > lo[j]) {
          lo[j] = c;
          moved = true;
        }
      }
    } else {
      if (std::abs(new_hi) < kBoundCap) {
        new_hi += 1e-9 * rel(new_hi);
        if (new_hi < hi[j] - 1e-7 * rel(hi[j])) {
          hi[j] = new_hi;
          moved = true;
        }
      }
      if (std::abs(new_lo) < kBoundCap) {
        new_lo -= 1e-9 * rel(new_lo);
        if (new_lo > lo[j] + 1e-7 * rel(lo[j])) {
          lo[j] = new_lo;
          moved = true;
        }
      }
    }
    if (lo[j] > hi[j]) {
      if (lo[j] > hi[j] + tol * rel(hi[j])) return false;
      if (is_int_[j]) return false;
      const double mid = 0.5 * (lo[j] + hi[j]);
      lo[j] = mid;
      hi[j] = mid;
    }
    if (moved) changed.push_back(j);
  }
  return true;
}

bool Propagator::propagate(std::vector<double>& lo,
                           std::vector<double>& hi) const {
  const int num_rows = static_cast<int>(rows_->size());
  std::deque<int> queue;
  std::vector<char> queued(num_rows, 1);
  for (int r = 0; r < num_rows; ++r) queue.push_back(r);
  std::int64_t budget = 20LL * num_rows + 1000;
  std::vector<int> changed;
  while (!queue.empty() && budget-- > 0) {
    const int r = queue.front();
    queue.pop_front();
    queued[r] = 0;
    changed.clear();
    if (!tighten_row(r, lo, hi, changed)) return false;
    for (int j : changed) {
      for (int s : col_rows_[j]) {
        if (s != r && !queued[s]) {
          queued[s] = 1;
          queue.push_back(s);
        }
      }
    }
  }
  return true;
}

std::vector<double> ReducedProblem::postsolve(
    const std::vector<double>& reduced) const {
  std::vector<double> x(num_original, 0.0);
  for (int j = 0; j < num_original; ++j) {
    const int c = var_to_col[j];
    x[j] = c >= 0 ? reduced[c] : fixed_value[j];
  }
  return x;
}

ReducedProblem presolve(const MilpModel& model, const SolveOptions& opts) {
  const int n = model.num_variables();
  ReducedProblem out;
  out.num_original = n;
  std::vector<double> lo(n);
  std::vector<double> hi(n);
  std::vector<char> is_int(n);
  for (int j = 0; j < n; ++j) {
    const Variable& v = model.variable(j);
    lo[j] = v.lower;
    hi[j] = v.upper;
    is_int[j] = v.kind == VarKind::kBinary ? 1 : 0;
  }
  if (opts.apply_hints) {
    for (const FixingHint& h : model.hints()) {
      lo[h.var] = std::max(lo[h.var], h.value);
      hi[h.var] = std::min(hi[h.var], h.value);
    }
  }
  for (int j = 0; j < n; ++j) {
    if (lo[j] > hi[j]) out.infeasible = true;
  }

  std::vector<SparseRow> rows;
  rows.reserve(model.num_constraints());
  for (const Constraint& c : model.constraints()) {
    SparseRow row;
    for (const Term& t : c.terms) {
      row.idx.push_back(t.var);
      row.val.push_back(t.coef);
    }
    row.lower = c.sense == Sense::kLessEqual ? -kInf : c.rhs;
    row.upper = c.sense == Sense::kGreaterEqual ? kInf : c.rhs;
    rows.push_back(std::move(row));
  }

  if (opts.presolve && !out.infeasible) {
    Propagator prop(&rows, is_int, n);
    if (!prop.propagate(lo, hi)) out.infeasible = true;
  }

  out.var_to_col.assign(n, -1);
  out.fixed_value.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (opts.presolve && lo[j] == hi[j]) {
      out.fixed_value[j] = lo[j];
      continue;
    }
    out.var_to_col[j] = out.num_cols();
    out.col_to_var.push_back(j);
    out.lower.push_back(lo[j]);
    out.upper.push_back(hi[j]);
    out.cost.push_back(0.0);
    out.is_int.push_back(is_int[j]);
    out.priority.push_back(model.variable(j).priority);
  }
  for (const auto& [var, coef] : model.objective()) {
    const int c = out.var_to_col[var];
    if (c >= 0) {
      out.cost[c] = coef;
    } else {
      out.objective_offset += coef * out.fixed_value[var];
    }
  }

  for (const SparseRow& row : rows) {
    SparseRow red;
    double shift = 0.0;
    double min_act = 0.0;
    double max_act = 0.0;
    for (std::size_t p = 0; p < row.idx.size(); ++p) {
      const int j = row.idx[p];
      const double a = row.val[p];
      const int c = out.var_to_col[j];
      if (c < 0) {
        shift += a * out.fixed_value[j];
        continue;
      }
      red.idx.push_back(c);
      red.val.push_back(a);
      min_act += a > 0 ? a * lo[j] : a * hi[j];
      max_act += a > 0 ? a * hi[j] : a * lo[j];
    }
    red.lower = row.lower - shift;
    red.upper = row.upper - shift;
    const double tol = opts.feasibility_tol;
    if (red.idx.empty()) {
      if (red.lower > tol * rel(red.lower) || red.upper < -tol * rel(red.upper)) {
        out.infeasible = true;
      }
      continue;
    }
    if (opts.presolve && min_act >= red.lower && max_act <= red.upper) continue;
    out.rows.push_back(std::move(red));
  }
  return out;
}

}  // namespace dnti::milp
