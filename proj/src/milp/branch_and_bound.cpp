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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <queue>
#include <utility>

#include "dnti/milp/model.hpp"
#include "dnti/milp/presolve.hpp"
#include "dnti/milp/simplex.hpp"

namespace dnti::milp {
namespace {

LpProblem to_dense(const ReducedProblem& rp) {
  LpProblem lp;
  lp.rows = static_cast<int>(rp.rows.size());
  lp.cols = rp.num_cols();
  lp.a.assign(static_cast<std::size_t>(lp.rows) * lp.cols, 0.0);
  for (int i = 0; i < lp.rows; ++i) {
    const SparseRow& row = rp.rows[i];
    for (std::size_t p = 0; p < row.idx.size(); ++p) {
      lp.a[static_cast<std::size_t>(i) * lp.cols + row.idx[p]] += row.val[p];
    }
    lp.row_lower.push_back(row.lower);
    lp.row_upper.push_back(row.upper);
  }
  lp.cost = rp.cost;
  lp.col_lower = rp.lower;
  lp.col_upper = rp.upper;
  return lp;
}

constexpr std::int64_t kDiveIterationLimit = 100;
// Without an incumbent, every this many nodes also dive.
constexpr std::int64_t kDiveSpacing = 10;

struct Node {
  double bound = -kInf;
  int depth = 0;
  std::int64_t id = 0;
  std::vector<std::pair<int, unsigned char>> fixes;
  std::shared_ptr<const DenseSimplex::Basis> basis;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

}  // namespace

LpResult lp_solve(const MilpModel& model, const std::map<int, double>& fixings) {
  model.validate();
  SolveOptions opts;
  opts.presolve = false;
  opts.apply_hints = false;
  ReducedProblem rp = presolve(model, opts);
  for (const auto& [var, value] : fixings) {
    rp.lower[var] = value;
    rp.upper[var] = value;
  }
  LpResult result;
  if (rp.infeasible) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  DenseSimplex simplex(to_dense(rp));
  result.status = simplex.solve();
  result.iterations = simplex.iterations();
  if (result.status == LpStatus::kOptimal) {
    result.values = simplex.primal_values();
    result.objective = model.objective_value(result.values);
  }
  return result;
}

MilpSolution solve(const MilpModel& model, const SolveOptions& opts) {
  model.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };

  MilpSolution sol;
  const ReducedProblem rp = presolve(model, opts);
  if (rp.infeasible) {
    sol.status = SolveStatus::kInfeasible;
    return sol;
  }
  const int ncols = rp.num_cols();
  DenseSimplex simplex(to_dense(rp));
  const Propagator prop(&rp.rows, rp.is_int, ncols);

  std::vector<double> incumbent;
  double inc_obj = kInf;
  double min_gap_pruned = kInf;
  auto cutoff = [&] {
    if (!std::isfinite(inc_obj)) return kInf;
    return inc_obj - std::max(1e-9, opts.relative_gap * std::abs(inc_obj));
  };
  auto prune = [&](double bound) {
    if (bound < inc_obj - 1e-9 * std::max(1.0, std::abs(inc_obj))) {
      min_gap_pruned = std::min(min_gap_pruned, bound);
    }
  };

  int top_priority = 0;
  for (int j = 0; j < ncols; ++j) {
    if (rp.is_int[j]) top_priority = std::max(top_priority, rp.priority[j]);
  }
  auto set_int_bounds = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    for (int j = 0; j < ncols; ++j) {
      if (rp.is_int[j]) {
        simplex.set_col_bounds(j, lo[j], hi[j]);
      } else {
        simplex.set_col_bounds(j, rp.lower[j], rp.upper[j]);
      }
    }
  };
  auto offer = [&](std::vector<double> x, double obj) {
    for (int j = 0; j < ncols; ++j) {
      if (rp.is_int[j]) x[j] = std::round(x[j]);
    }
    std::vector<double> orig = rp.postsolve(x);
    const double viol = model.max_violation(orig);
    if (viol <= std::max(1e-6, opts.feasibility_tol) && obj < inc_obj) {
      inc_obj = obj;
      incumbent = std::move(orig);
    }
  };
  std::vector<std::vector<int>> col_rows(ncols);
  for (int r = 0; r < static_cast<int>(rp.rows.size()); ++r) {
    for (int j : rp.rows[r].idx) col_rows[j].push_back(r);
  }
  // Picks the bound of binary j that keeps the rows through j closest to
  // satisfied at the point x; ties go to the nearest integer.
  auto rounding_value = [&](int j, const std::vector<double>& x) {
    double viol[2] = {0.0, 0.0};
    for (int r : col_rows[j]) {
      const SparseRow& row = rp.rows[r];
      double act = 0.0;
      double coef = 0.0;
      for (std::size_t p = 0; p < row.idx.size(); ++p) {
        if (row.idx[p] == j) {
          coef += row.val[p];
        } else {
          act += row.val[p] * x[row.idx[p]];
        }
      }
      for (int v = 0; v < 2; ++v) {
        const double a = act + coef * v;
        viol[v] += std::max(0.0, row.lower - a) + std::max(0.0, a - row.upper);
      }
    }
    const double tol = 1e-9 * (1.0 + viol[0] + viol[1]);
    if (viol[0] < viol[1] - tol) return 0.0;
    if (viol[1] < viol[0] - tol) return 1.0;
    return std::round(x[j]);
  };
  // Per priority class: how often the rounding rule or its flip survived.
  std::map<int, int> round_wins;
  std::map<int, int> flip_wins;
  // Rounding dive from a node LP point: fix the least fractional binary,
  // propagate, re-solve, and repeat until integral, infeasible or cut off.
  auto dive = [&](std::vector<double> lo, std::vector<double> hi, std::vector<double> x) {
    for (int j = 0; j < ncols; ++j) {
      if (rp.is_int[j] && rp.priority[j] == top_priority &&
          std::abs(x[j] - std::round(x[j])) <= opts.integrality_tol) {
        lo[j] = hi[j] = std::round(x[j]);
      }
    }
    if (!prop.propagate(lo, hi)) return;
    for (int step = 0; step < ncols; ++step) {
      int pick = -1;
      double pick_dist = 1.0;
      for (int j = 0; j < ncols; ++j) {
        if (!rp.is_int[j]) continue;
        const double dist = std::abs(x[j] - std::round(x[j]));
        if (dist <= opts.integrality_tol) continue;
        if (pick < 0 || rp.priority[j] > rp.priority[pick] ||
            (rp.priority[j] == rp.priority[pick] && dist < pick_dist)) {
          pick = j;
          pick_dist = dist;
        }
      }
      if (pick < 0) {
        offer(x, simplex.objective() + rp.objective_offset);
        return;
      }
      const int cls = rp.priority[pick];
      const bool flip_first = flip_wins[cls] > round_wins[cls];
      const double v = flip_first ? 1.0 - rounding_value(pick, x) : rounding_value(pick, x);
      bool moved = false;
      const DenseSimplex::Basis start = simplex.basis();
      for (double value : {v, 1.0 - v}) {
        if (value != v) {
          set_int_bounds(lo, hi);
          simplex.load_basis(start);
        }
        std::vector<double> lo2 = lo;
        std::vector<double> hi2 = hi;
        lo2[pick] = value;
        hi2[pick] = value;
        if (!prop.propagate(lo2, hi2)) continue;
        set_int_bounds(lo2, hi2);
        simplex.set_iteration_limit(kDiveIterationLimit);
        const LpStatus dst = simplex.solve();
        simplex.set_iteration_limit(0);
        if (dst != LpStatus::kOptimal) continue;
        if (simplex.objective() + rp.objective_offset >= cutoff()) return;
        lo = std::move(lo2);
        hi = std::move(hi2);
        x = simplex.primal_values();
        ((value == v) != flip_first ? round_wins : flip_wins)[cls] += 1;
        moved = true;
        break;
      }
      if (!moved) return;
    }
  };

  std::priority_queue<Node, std::vector<Node>, WorseNode> open;
  std::int64_t next_id = 0;
  open.push(Node{-kInf, 0, next_id++, {}, nullptr});
  const DenseSimplex::Basis* loaded = nullptr;
  SolveStatus limit_status = SolveStatus::kOptimal;
  bool hit_limit = false;

  while (!open.empty()) {
    if (open.top().bound >= cutoff()) {
      prune(open.top().bound);
      open.pop();
      continue;
    }
    if (sol.nodes_explored >= opts.node_limit) {
      limit_status = SolveStatus::kNodeLimit;
      hit_limit = true;
      break;
    }
    if (elapsed() > opts.time_limit_seconds) {
      limit_status = SolveStatus::kTimeLimit;
      hit_limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    ++sol.nodes_explored;
    if (opts.log_interval > 0 && sol.nodes_explored % opts.log_interval == 0) {
      std::fprintf(stderr, "nodes %lld open %zu bound %.6g incumbent %.6g lp_iter %lld t %.2f\n",
                   static_cast<long long>(sol.nodes_explored), open.size(),
                   node.bound, inc_obj, static_cast<long long>(simplex.iterations()),
                   elapsed());
    }

    std::vector<double> lo = rp.lower;
    std::vector<double> hi = rp.upper;
    for (const auto& [col, value] : node.fixes) {
      lo[col] = value;
      hi[col] = value;
    }
    if (!prop.propagate(lo, hi)) continue;
    // Continuous bounds implied by single rows add nothing to the LP; only
    // the inferred binary fixings are passed on.
    set_int_bounds(lo, hi);
    if (node.basis && node.basis.get() != loaded) {
      simplex.load_basis(*node.basis);
    }
    loaded = nullptr;
    LpStatus st = simplex.solve();
    if (st == LpStatus::kNumericalFailure) {
      simplex.reset_to_slack_basis();
      st = simplex.solve();
    }
    if (st == LpStatus::kUnbounded && node.depth == 0) {
      sol.status = SolveStatus::kUnbounded;
      sol.lp_iterations = simplex.iterations();
      return sol;
    }
    if (st != LpStatus::kOptimal) continue;
    const double obj = simplex.objective() + rp.objective_offset;
    if (obj >= cutoff()) {
      prune(obj);
      continue;
    }
    std::vector<double> x = simplex.primal_values();

    int branch = -1;
    double branch_dist = 0.0;
    bool any_frac = false;
    for (int j = 0; j < ncols; ++j) {
      if (!rp.is_int[j]) continue;
      const double dist = std::abs(x[j] - std::round(x[j]));
      if (dist > 1e-12) any_frac = true;
      if (dist <= opts.integrality_tol) continue;
      if (branch < 0) {
        branch = j;
        branch_dist = dist;
        continue;
      }
      if (opts.use_priorities && rp.priority[j] != rp.priority[branch]) {
        if (rp.priority[j] > rp.priority[branch]) {
          branch = j;
          branch_dist = dist;
        }
        continue;
      }
      if (dist > branch_dist) {
        branch = j;
        branch_dist = dist;
      }
    }

    if (branch < 0) {
      double cand_obj = obj;
      if (any_frac) {
        for (int j = 0; j < ncols; ++j) {
          if (!rp.is_int[j]) continue;
          const double v = std::round(x[j]);
          simplex.set_col_bounds(j, v, v);
        }
        if (simplex.solve() != LpStatus::kOptimal) continue;
        x = simplex.primal_values();
        cand_obj = simplex.objective() + rp.objective_offset;
      }
      offer(x, cand_obj);
      continue;
    }

    auto basis = std::make_shared<const DenseSimplex::Basis>(simplex.basis());
    loaded = basis.get();
    const bool top_integral = opts.use_priorities && rp.priority[branch] < top_priority;
    if (top_integral || (incumbent.empty() && sol.nodes_explored % kDiveSpacing == 1)) {
      dive(lo, hi, x);
      loaded = nullptr;
    }
    const unsigned char first = x[branch] >= 0.5 ? 1 : 0;
    for (unsigned char value : {first, static_cast<unsigned char>(1 - first)}) {
      Node child;
      child.bound = obj;
      child.depth = node.depth + 1;
      child.id = next_id++;
      child.fixes = node.fixes;
      child.fixes.emplace_back(branch, value);
      child.basis = basis;
      open.push(std::move(child));
    }
  }

  sol.lp_iterations = simplex.iterations();
  double bound = inc_obj;
  if (hit_limit) {
    bound = std::min(bound, open.top().bound);
  }
  bound = std::min(bound, min_gap_pruned);
  sol.best_bound = bound;
  if (!incumbent.empty()) {
    sol.values = incumbent;
    sol.objective = model.objective_value(incumbent);
    sol.max_violation = model.max_violation(incumbent);
    sol.gap = (inc_obj - bound) / std::max(1e-10, std::abs(inc_obj));
    if (inc_obj - bound <= 1e-9 * std::max(1.0, std::abs(inc_obj))) {
      sol.gap = 0.0;
    }
  }
  if (hit_limit) {
    sol.status = limit_status;
  } else if (incumbent.empty()) {
    sol.status = SolveStatus::kInfeasible;
  } else {
    sol.status = sol.gap == 0.0 ? SolveStatus::kOptimal : SolveStatus::kGapLimit;
  }
  return sol;
}

}  // namespace dnti::milp
