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

#ifndef DNTI_MILP_SIMPLEX_HPP_
#define DNTI_MILP_SIMPLEX_HPP_

#include <cstdint>
#include <vector>

#include "dnti/milp/model.hpp"

namespace dnti::milp {

// min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
struct LpProblem {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // dense, row-major rows x cols
  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
};

struct SimplexOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double pivot_tol = 1e-7;
  int refresh_interval = 100;
};

// Bounded-variable simplex on a dense condensed tableau T = B^-1 N.
// Every row i carries a logical variable r_i = (A x)_i bounded by the row
// bounds, so the slack basis is always available.
class DenseSimplex {
 public:
  struct Basis {
    std::vector<int> head;                // basic variable per row
    std::vector<unsigned char> at_upper;  // per variable, nonbasic status
  };

  explicit DenseSimplex(const LpProblem& lp, SimplexOptions opts = {});

  int rows() const { return m_; }
  int cols() const { return n_; }

  void set_col_bounds(int j, double lower, double upper);
  double col_lower(int j) const { return lo_[j]; }
  double col_upper(int j) const { return hi_[j]; }

  // Dual simplex when the current basis is dual feasible, primal two-phase
  // otherwise.
  LpStatus solve();
  LpStatus solve_primal();

  Basis basis() const;
  // Moves to the target basis by pivoting; falls back to reinversion.
  void load_basis(const Basis& target);
  void reset_to_slack_basis();

  double objective() const;
  std::vector<double> primal_values() const;
  std::int64_t iterations() const { return iterations_; }
  // Caps the pivots of the following solve() calls; 0 removes the cap.
  // A capped solve returns kIterationLimit with a dual feasible basis.
  void set_iteration_limit(std::int64_t pivots) { pivot_limit_ = pivots; }

 private:
  enum class Step { kContinue, kDone, kInfeasible, kUnbounded, kFailure };

  double* row(int i) { return &t_[static_cast<std::size_t>(i) * n_]; }
  const double* row(int i) const {
    return &t_[static_cast<std::size_t>(i) * n_];
  }
  double nonbasic_value(int var) const;
  bool is_fixed(int var) const { return lo_[var] == hi_[var]; }
  bool is_basic(int var) const { return where_[var] >= 0; }

  void compute_primal();
  void compute_duals();
  void refresh();
  void compute_row_weights();
  void pivot(int r, int k);
  void move_nonbasic(int k, double delta);
  double primal_infeasibility(int var) const;
  double max_primal_infeasibility() const;
  bool dual_feasible() const;
  int price(const std::vector<double>& d, bool bland) const;
  int ratio_test_primal(int k, double dir, bool phase1, bool bland,
                        double* theta) const;
  Step primal_iteration(bool phase1, bool bland);
  Step dual_iteration(bool bland);
  LpStatus run_primal();
  LpStatus run_dual();
  void reinvert(const std::vector<int>& target_head);
  bool verify();

  SimplexOptions opts_;
  int m_ = 0;
  int n_ = 0;
  std::vector<double> a_;
  std::vector<int> a_start_;  // row-wise sparse copy of a_
  std::vector<int> a_col_;
  std::vector<double> a_val_;
  std::vector<double> c_;   // size n_ + m_
  std::vector<double> lo_;  // size n_ + m_
  std::vector<double> hi_;
  std::vector<int> head_;      // m_
  std::vector<int> nonbasic_;  // n_
  std::vector<int> where_;     // row if basic, -(k + 1) if nonbasic column k
  std::vector<unsigned char> at_upper_;
  std::vector<double> t_;
  std::vector<double> row_weight_;  // 1 + squared norm of each tableau row
  std::vector<double> d_;
  std::vector<double> d1_;
  std::vector<int> nz_;        // scratch: nonzero positions of a row
  std::vector<double> vals_;   // scratch: nonbasic values
  std::vector<double> x_;
  std::int64_t iterations_ = 0;
  int since_refresh_ = 0;
  std::int64_t pivot_limit_ = 0;
  std::int64_t limit_at_ = 0;
  std::int64_t degenerate_run_ = 0;
};

}  // namespace dnti::milp

#endif  // DNTI_MILP_SIMPLEX_HPP_
